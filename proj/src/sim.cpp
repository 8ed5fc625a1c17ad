#include "l3/sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "l3/error.hpp"
#include "fleet.hpp"
#include "rng.hpp"
#include "trace.hpp"

namespace l3 {

std::string to_string(MacMode mode) { return mode == MacMode::L3 ? "l3" : "csma"; }

MacMode parse_mac_mode(const std::string& s) {
  if (s == "l3") return MacMode::L3;
  if (s == "csma") return MacMode::CsmaBaseline;
  throw InvalidInput("unknown mac mode '" + s + "' (expected l3 or csma)");
}

std::vector<VehicleSpec> materialize_vehicles(const ScenarioConfig& cfg) {
  std::vector<VehicleSpec> out = cfg.vehicles;
  if (!cfg.placement || cfg.placement->count <= 0) return out;

  const RandomPlacement& p = *cfg.placement;
  VehicleId next_id = 1;
  for (const auto& v : out) next_id = std::max(next_id, v.id + 1);

  detail::Rng rng(cfg.seed);
  constexpr int kMaxDraws = 1000000;
  int draws = 0;
  while (static_cast<int>(out.size()) < static_cast<int>(cfg.vehicles.size()) + p.count) {
    if (++draws > kMaxDraws) throw InvalidInput("random placement cannot fit the requested vehicles");
    const Position cand{p.min.x + rng.uniform() * (p.max.x - p.min.x),
                        p.min.y + rng.uniform() * (p.max.y - p.min.y)};
    const bool too_close = std::any_of(out.begin(), out.end(), [&](const VehicleSpec& v) {
      return distance(v.pos, cand) < p.min_separation;
    });
    if (!too_close) out.push_back({next_id++, cand});
  }
  return out;
}

int effective_max_slots(const ScenarioConfig& cfg, std::size_t vehicle_count) {
  if (cfg.max_slots > 0) return cfg.max_slots;
  return static_cast<int>(std::min<std::size_t>(10 * std::max<std::size_t>(vehicle_count, 1), 10000));
}

GroundTruth build_world(const ScenarioConfig& cfg, const std::vector<VehicleSpec>& vehicles) {
  GroundTruth world;
  world.objects = cfg.objects;
  for (const auto& v : vehicles) world.vehicles.push_back({v.id, Disc{v.pos, cfg.vehicle_radius}});
  return world;
}

void ScenarioConfig::validate() const {
  grid.validate();
  channel.validate();
  if (!(sensing_range > 0.0)) throw InvalidInput("sensing_range must be positive");
  if (!(slot_duration_ms > 0.0)) throw InvalidInput("slot_duration must be positive");
  if (!(vehicle_radius > 0.0)) throw InvalidInput("vehicle_radius must be positive");
  if (max_slots < 0) throw InvalidInput("max_slots must be positive");
  access.validate();
  if (csma.cw_min < 1 || csma.cw_max < csma.cw_min) throw InvalidInput("invalid contention window");
  if (!(csma.backoff_slot_us >= 0.0)) throw InvalidInput("backoff slot must be non-negative");
  for (const auto& o : objects) {
    if (!(o.radius > 0.0)) throw InvalidInput("object radius must be positive");
  }
  if (placement) {
    if (placement->count < 0) throw InvalidInput("placement count must be non-negative");
    if (placement->max.x < placement->min.x || placement->max.y < placement->min.y) {
      throw InvalidInput("placement box is inverted");
    }
    // Draws are half-open, so the upper corner may sit on the zone edge.
    const Position lo = zone_origin(locate_zone(placement->min, grid), grid);
    if (placement->max.x > lo.x + grid.zone_side || placement->max.y > lo.y + grid.zone_side) {
      throw InvalidInput("placement box spans more than one zone");
    }
  }
  std::set<VehicleId> ids;
  for (const auto& v : vehicles) {
    if (!ids.insert(v.id).second) throw InvalidInput("duplicate vehicle id " + std::to_string(v.id));
  }
  if (vehicles.empty() && (!placement || placement->count == 0)) {
    throw InvalidInput("scenario has no vehicles");
  }
  if (!vehicles.empty()) {
    const ZoneIndex z = locate_zone(vehicles.front().pos, grid);
    for (const auto& v : vehicles) {
      if (locate_zone(v.pos, grid) != z) {
        throw InvalidInput("vehicle " + std::to_string(v.id) + " is not in the scenario zone");
      }
    }
    if (placement && placement->count > 0 && locate_zone(placement->min, grid) != z) {
      throw InvalidInput("placement box lies in another zone than the listed vehicles");
    }
  }
  if (initiators) {
    for (VehicleId id : *initiators) {
      if (id <= 0) throw InvalidInput("initiator ids must be positive");
    }
  }
}

namespace detail {

Fleet prepare_fleet(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto specs = materialize_vehicles(cfg);
  if (cfg.initiators) {
    for (VehicleId id : *cfg.initiators) {
      if (std::none_of(specs.begin(), specs.end(), [&](const VehicleSpec& s) { return s.id == id; })) {
        throw InvalidInput("initiator " + std::to_string(id) + " is not a vehicle of the scenario");
      }
    }
  }
  const GroundTruth world = build_world(cfg, specs);
  Fleet fleet;
  for (const auto& s : specs) {
    std::optional<bool> initiator;
    if (cfg.initiators) {
      initiator = std::find(cfg.initiators->begin(), cfg.initiators->end(), s.id) != cfg.initiators->end();
    }
    fleet.vehicles.push_back(init_vehicle(s.id, s.pos, world, cfg.grid, cfg.sensing_range, initiator));
    fleet.receivers.push_back({s.id, s.pos});
  }
  for (const auto& v : fleet.vehicles) {
    int k = 0;
    for (const auto& o : fleet.vehicles) {
      if (o.id != v.id && distance(o.position, v.position) <= cfg.channel.comm_range) ++k;
    }
    fleet.neighbors.push_back(k);
  }
  // Nobody to talk to: a lone vehicle keeps its matrix to itself.
  for (std::size_t i = 0; i < fleet.vehicles.size(); ++i) {
    if (fleet.neighbors[i] == 0) fleet.vehicles[i].pending_tx = fleet.vehicles[i].fresh = false;
  }
  return fleet;
}

void finish(RunResult& result, const std::vector<VehicleState>& vehicles) {
  for (const auto& v : vehicles) result.metrics.per_vehicle.push_back({v.id, v.tx_slots, v.rx_slots});
  result.metrics.final_matrix = vehicles.front().matrix;
  result.final_states = vehicles;
}

}  // namespace detail

RunResult run(const ScenarioConfig& cfg) {
  detail::Fleet fleet = detail::prepare_fleet(cfg);
  auto& vehicles = fleet.vehicles;
  const int cap = effective_max_slots(cfg, vehicles.size());

  RunResult result;
  RunMetrics& m = result.metrics;
  detail::Rng rng(detail::splitmix64(cfg.seed ^ 0x6c33u));

  if (is_globally_converged(vehicles, false)) {
    m.converged = true;
  } else {
    m.quiescent_slot = cap;
    for (int slot = 1; slot <= cap; ++slot) {
      if (std::none_of(vehicles.begin(), vehicles.end(), [](const VehicleState& v) { return v.pending_tx; })) {
        m.quiescent_slot = slot;
        result.trace.push_back(detail::trace_silent_slot(slot));
        break;
      }
      std::vector<Transmission> txs;
      for (std::size_t i = 0; i < vehicles.size(); ++i) {
        VehicleState& v = vehicles[i];
        if (!v.pending_tx) continue;
        // Initiators open the exchange together; afterwards access is random.
        if (slot > 1 && rng.uniform() >= access_probability(v, fleet.neighbors[i], cfg.access)) continue;
        txs.push_back(*on_slot_begin(v));
      }
      const ChannelOutcome outcome = resolve_slot(txs, fleet.receivers, cfg.channel);
      result.trace.push_back(detail::trace_slot(slot, txs, outcome));
      for (auto& v : vehicles) {
        const Reception& rec = outcome.at(v.id);
        if (const auto* d = std::get_if<Delivered>(&rec)) {
          on_delivery(v, d->packet, d->contested);
        } else if (std::holds_alternative<Collision>(rec)) {
          on_collision(v);
        } else if (std::none_of(txs.begin(), txs.end(), [&](const Transmission& t) { return t.sender == v.id; })) {
          on_silence(v);
        }
      }
      if (!txs.empty()) m.last_tx_slot = slot;
      m.total_transmissions += static_cast<int>(txs.size());
    }
    m.converged = is_globally_converged(vehicles, false) && m.quiescent_slot > m.last_tx_slot;
  }
  m.latency_ms = m.quiescent_slot * cfg.slot_duration_ms;
  detail::finish(result, vehicles);
  return result;
}

RunResult simulate(const ScenarioConfig& cfg) {
  return cfg.mac == MacMode::L3 ? run(cfg) : run_baseline(cfg);
}

std::uint64_t derive_seed(std::uint64_t master, int count, int trial) {
  std::uint64_t h = detail::splitmix64(master);
  h = detail::splitmix64(h ^ static_cast<std::uint64_t>(count));
  return detail::splitmix64(h ^ (static_cast<std::uint64_t>(trial) << 32));
}

RandomPlacement default_sweep_placement(const GridConfig& grid, int count) {
  const double half = 0.35 * grid.zone_side;
  const double mid = 0.5 * grid.zone_side;
  return {count,
          {grid.origin.x + mid - half, grid.origin.y + mid - half},
          {grid.origin.x + mid + half, grid.origin.y + mid + half},
          1.0};
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::vector<int>& counts, int trials,
                            std::uint64_t master_seed) {
  if (counts.empty()) throw InvalidInput("sweep needs at least one vehicle count");
  if (trials < 1) throw InvalidInput("sweep needs at least one trial");
  for (int c : counts) {
    if (c < 1) throw InvalidInput("vehicle counts must be positive");
  }
  std::vector<SweepRow> rows;
  for (int count : counts) {
    for (int trial = 0; trial < trials; ++trial) {
      ScenarioConfig cfg = base;
      cfg.vehicles.clear();
      RandomPlacement p = base.placement.value_or(default_sweep_placement(base.grid, count));
      p.count = count;
      cfg.placement = p;
      cfg.seed = derive_seed(master_seed, count, trial);
      const RunMetrics m = simulate(cfg).metrics;
      rows.push_back({count, trial, cfg.seed, cfg.mac, m.last_tx_slot, m.quiescent_slot, m.latency_ms,
                      m.converged});
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "count,trial,seed,mac,last_tx_slot,quiescent_slot,latency_ms,converged\n";
  for (const auto& r : rows) {
    os << r.count << ',' << r.trial << ',' << r.seed << ',' << to_string(r.mac) << ',' << r.last_tx_slot
       << ',' << r.quiescent_slot << ',' << detail::format_ms(r.latency_ms) << ',' << (r.converged ? 1 : 0)
       << '\n';
  }
  return os.str();
}

std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows) {
  std::vector<SweepSummary> out;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const SweepSummary& s) { return s.count == r.count && s.mac == r.mac; });
    if (it == out.end()) {
      out.push_back({r.count, r.mac, 0.0, r.quiescent_slot, r.quiescent_slot, 0.0, 0, 0});
      it = std::prev(out.end());
    }
    it->mean_slots += r.quiescent_slot;
    it->mean_latency_ms += r.latency_ms;
    it->min_slots = std::min(it->min_slots, r.quiescent_slot);
    it->max_slots = std::max(it->max_slots, r.quiescent_slot);
    it->converged_trials += r.converged ? 1 : 0;
    ++it->trials;
  }
  for (auto& s : out) {
    s.mean_slots /= s.trials;
    s.mean_latency_ms /= s.trials;
  }
  return out;
}

std::optional<SweepPreset> find_preset(const std::string& name) {
  std::vector<int> small;
  for (int n = 3; n <= 15; ++n) small.push_back(n);
  const std::vector<MacMode> both{MacMode::L3, MacMode::CsmaBaseline};
  if (name == "paper-fig7") return SweepPreset{name, small, 20, {MacMode::L3}};
  if (name == "paper-fig8") return SweepPreset{name, small, 20, both};
  if (name == "paper-fig9") return SweepPreset{name, {15, 30, 60, 90, 120, 150, 180, 225}, 10, both};
  return std::nullopt;
}

ScenarioConfig preset_base() {
  ScenarioConfig base;
  base.initiators = std::vector<VehicleId>{1};
  return base;
}

std::vector<SweepRow> run_preset(const SweepPreset& preset, ScenarioConfig base, std::uint64_t master_seed) {
  std::vector<SweepRow> rows;
  for (MacMode mac : preset.macs) {
    base.mac = mac;
    auto part = sweep(base, preset.counts, preset.trials, master_seed);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

std::string metrics_csv(const RunMetrics& m) {
  std::ostringstream os;
  os << "last_tx_slot,quiescent_slot,latency_ms,total_transmissions,converged\n";
  os << m.last_tx_slot << ',' << m.quiescent_slot << ',' << detail::format_ms(m.latency_ms) << ','
     << m.total_transmissions << ',' << (m.converged ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace l3
