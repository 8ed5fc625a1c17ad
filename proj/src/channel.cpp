#include "l3/channel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "l3/error.hpp"

namespace l3 {

void ChannelConfig::validate() const {
  if (!(comm_range > 0.0)) throw InvalidInput("comm_range must be positive");
  if (!(capture_threshold_db >= 0.0)) throw InvalidInput("capture_threshold must be >= 0 dB");
  if (!(path_loss_exponent > 0.0)) throw InvalidInput("path_loss_exponent must be positive");
  if (!std::isfinite(reference_power_db)) throw InvalidInput("reference_power must be finite");
}

double received_power_db(Position tx, Position rx, const ChannelConfig& cfg) {
  const double d = distance(tx, rx);
  if (!(d > 0.0)) throw DegenerateGeometry("transmitter and receiver share a position");
  return cfg.reference_power_db - 10.0 * cfg.path_loss_exponent * std::log10(d);
}

namespace {

struct SignalGroup {
  std::vector<const Transmission*> members;
};

}  // namespace

ChannelOutcome resolve_slot(std::span<const Transmission> txs, std::span<const Receiver> receivers,
                            const ChannelConfig& cfg) {
  std::set<VehicleId> senders;
  for (const auto& t : txs) {
    if (!senders.insert(t.sender).second) {
      throw InvalidSlot("vehicle " + std::to_string(t.sender) + " transmits twice in one slot");
    }
  }

  // Group byte-identical frames; group order follows first appearance.
  std::vector<SignalGroup> groups;
  for (const auto& t : txs) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const SignalGroup& g) {
      const Packet& p = g.members.front()->packet;
      return p.zone == t.packet.zone && p.payload == t.packet.payload;
    });
    if (it == groups.end()) {
      groups.push_back({{&t}});
    } else {
      it->members.push_back(&t);
    }
  }

  ChannelOutcome outcome;
  for (const auto& r : receivers) {
    if (senders.count(r.id)) {
      outcome.per_receiver[r.id] = Silence{};
      continue;
    }

    struct Heard {
      const Transmission* nearest;
      double power_db;
    };
    std::vector<Heard> heard;
    for (const auto& g : groups) {
      const Transmission* nearest = nullptr;
      double best = 0.0;
      for (const Transmission* m : g.members) {
        const double d = distance(m->sender_pos, r.pos);
        if (!nearest || d < best) {
          nearest = m;
          best = d;
        }
      }
      if (best > cfg.comm_range) continue;
      heard.push_back({nearest, received_power_db(nearest->sender_pos, r.pos, cfg)});
    }

    if (heard.empty()) {
      outcome.per_receiver[r.id] = Silence{};
      continue;
    }
    if (heard.size() == 1) {
      outcome.per_receiver[r.id] = Delivered{heard.front().nearest->packet, false};
      continue;
    }

    const auto strongest = std::max_element(
        heard.begin(), heard.end(), [](const Heard& a, const Heard& b) { return a.power_db < b.power_db; });
    double interference_linear = 0.0;
    for (auto it = heard.begin(); it != heard.end(); ++it) {
      if (it != strongest) interference_linear += std::pow(10.0, it->power_db / 10.0);
    }
    const double interference_db = 10.0 * std::log10(interference_linear);
    if (strongest->power_db >= interference_db + cfg.capture_threshold_db) {
      outcome.per_receiver[r.id] = Delivered{strongest->nearest->packet, true};
    } else {
      outcome.per_receiver[r.id] = Collision{};
    }
  }
  return outcome;
}

}  // namespace l3
