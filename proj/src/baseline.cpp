#include <algorithm>

#include "fleet.hpp"
#include "l3/sim.hpp"
#include "rng.hpp"
#include "trace.hpp"

namespace l3 {

// One epoch per loop iteration: the armed vehicles count their backoff down,
// the earliest expiry seizes the medium, and every vehicle that expires at
// that same micro-slot without having heard a neighbor start transmits too.
// Receivers decode only a lone in-range sender. Senders whose frame collided
// somewhere double their window and stay armed.
RunResult run_baseline(const ScenarioConfig& cfg) {
  detail::Fleet fleet = detail::prepare_fleet(cfg);
  auto& vehicles = fleet.vehicles;
  const int cap = effective_max_slots(cfg, vehicles.size());
  const std::size_t n = vehicles.size();
  const double slot_us = cfg.slot_duration_ms * 1000.0;

  RunResult result;
  RunMetrics& m = result.metrics;
  detail::Rng rng(detail::splitmix64(cfg.seed ^ 0xc5u));
  std::vector<int> cw(n, cfg.csma.cw_min);
  std::vector<long> counter(n, -1);
  double elapsed_us = 0.0;

  auto in_range = [&](std::size_t a, std::size_t b) {
    return distance(vehicles[a].position, vehicles[b].position) <= cfg.channel.comm_range;
  };

  if (is_globally_converged(vehicles, false)) {
    m.converged = true;
  } else {
    m.quiescent_slot = cap;
    for (int epoch = 1; epoch <= cap; ++epoch) {
      std::vector<std::size_t> armed;
      for (std::size_t i = 0; i < n; ++i) {
        if (!vehicles[i].pending_tx) {
          counter[i] = -1;
          continue;
        }
        if (counter[i] < 0) counter[i] = static_cast<long>(rng.below(static_cast<std::uint64_t>(cw[i])));
        armed.push_back(i);
      }
      if (armed.empty()) {
        m.quiescent_slot = epoch;
        elapsed_us += slot_us;
        result.trace.push_back(detail::trace_silent_slot(epoch));
        break;
      }

      long first = counter[armed.front()];
      for (std::size_t i : armed) first = std::min(first, counter[i]);
      std::vector<std::size_t> senders;
      for (std::size_t i : armed) {
        if (counter[i] != first) continue;
        senders.push_back(i);
      }
      elapsed_us += static_cast<double>(first) * cfg.csma.backoff_slot_us + slot_us;
      // Everybody else froze their countdown while the medium was busy.
      for (std::size_t i : armed) counter[i] -= first;

      std::vector<Transmission> txs;
      std::vector<bool> sending(n, false);
      for (std::size_t i : senders) {
        sending[i] = true;
        counter[i] = -1;
        txs.push_back(*on_slot_begin(vehicles[i]));
      }

      ChannelOutcome outcome;
      std::vector<bool> collided(n, false);
      for (std::size_t r = 0; r < n; ++r) {
        const VehicleId rid = vehicles[r].id;
        if (sending[r]) {
          outcome.per_receiver[rid] = Silence{};
          continue;
        }
        std::vector<std::size_t> heard;
        for (std::size_t s : senders) {
          if (in_range(s, r)) heard.push_back(s);
        }
        if (heard.empty()) {
          outcome.per_receiver[rid] = Silence{};
        } else if (heard.size() == 1) {
          const auto it = std::find(senders.begin(), senders.end(), heard.front());
          outcome.per_receiver[rid] = Delivered{txs[static_cast<std::size_t>(it - senders.begin())].packet, false};
        } else {
          outcome.per_receiver[rid] = Collision{};
          for (std::size_t s : heard) collided[s] = true;
        }
      }
      result.trace.push_back(detail::trace_slot(epoch, txs, outcome));

      for (std::size_t i = 0; i < n; ++i) {
        VehicleState& v = vehicles[i];
        const Reception& rec = outcome.at(v.id);
        if (const auto* d = std::get_if<Delivered>(&rec)) {
          on_delivery(v, d->packet, false);
        } else if (std::holds_alternative<Collision>(rec)) {
          on_collision(v);
        }
        if (!sending[i]) continue;
        if (collided[i]) {
          cw[i] = std::min(2 * cw[i] + 1, cfg.csma.cw_max);
          v.pending_tx = true;
        } else {
          cw[i] = cfg.csma.cw_min;
        }
      }
      m.last_tx_slot = epoch;
      m.total_transmissions += static_cast<int>(txs.size());
    }
    m.converged = is_globally_converged(vehicles, false) && m.quiescent_slot > m.last_tx_slot;
  }
  m.latency_ms = elapsed_us / 1000.0;
  detail::finish(result, vehicles);
  return result;
}

}  // namespace l3
