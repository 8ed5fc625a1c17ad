#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "l3/channel.hpp"
#include "l3/grid.hpp"
#include "l3/protocol.hpp"
#include "l3/sensing.hpp"

namespace l3 {

enum class MacMode { L3, CsmaBaseline };

std::string to_string(MacMode mode);
MacMode parse_mac_mode(const std::string& s);

struct VehicleSpec {
  VehicleId id = 0;
  Position pos{};

  friend bool operator==(const VehicleSpec&, const VehicleSpec&) = default;
};

/// Uniform random vehicle placement inside an axis-aligned box. Candidates
/// closer than `min_separation` to an already placed vehicle are redrawn.
struct RandomPlacement {
  int count = 0;
  Position min{0.0, 0.0};
  Position max{100.0, 100.0};
  double min_separation = 1.0;

  friend bool operator==(const RandomPlacement&, const RandomPlacement&) = default;
};

/// Contention baseline: binary exponential backoff over micro-slots.
struct CsmaConfig {
  int cw_min = 15;
  int cw_max = 1023;
  double backoff_slot_us = 13.0;

  friend bool operator==(const CsmaConfig&, const CsmaConfig&) = default;
};

struct ScenarioConfig {
  GridConfig grid;
  ChannelConfig channel;
  double sensing_range = 25.0;
  double slot_duration_ms = 2.0;
  double vehicle_radius = 1.0;
  AccessConfig access;
  std::vector<VehicleSpec> vehicles;
  std::optional<RandomPlacement> placement;
  std::vector<Disc> objects;
  std::optional<std::vector<VehicleId>> initiators;
  int max_slots = 0;  // 0 selects 10 x vehicle count, capped at 10000
  MacMode mac = MacMode::L3;
  std::uint64_t seed = 0;
  CsmaConfig csma;

  /// Throws InvalidInput on any violated invariant of the materialized
  /// scenario.
  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Explicit vehicles followed by the randomly placed ones (ids continue after
/// the largest explicit id). Deterministic in `cfg.seed`.
std::vector<VehicleSpec> materialize_vehicles(const ScenarioConfig& cfg);

int effective_max_slots(const ScenarioConfig& cfg, std::size_t vehicle_count);

GroundTruth build_world(const ScenarioConfig& cfg, const std::vector<VehicleSpec>& vehicles);

struct VehicleTally {
  VehicleId id = 0;
  int tx_slots = 0;
  int rx_slots = 0;
};

struct RunMetrics {
  int last_tx_slot = 0;
  int quiescent_slot = 0;
  double latency_ms = 0.0;
  int total_transmissions = 0;
  bool converged = false;
  std::vector<VehicleTally> per_vehicle;
  SensingMatrix final_matrix;
};

struct RunResult {
  RunMetrics metrics;
  std::vector<std::string> trace;
  std::vector<VehicleState> final_states;
};

/// Runs the scenario with the MAC selected in `cfg.mac`.
RunResult simulate(const ScenarioConfig& cfg);

/// Slot-synchronous capture-effect run. Each slot collects the armed
/// vehicles that win their access draw, resolves the channel, then hands
/// deliveries to the receivers. Stops at the first slot in which nobody is
/// armed (the quiescent slot) or at the slot cap. `converged` additionally
/// requires every vehicle to hold the same information.
///
/// Trace lines: `slot=<t> tx=<ids|-> rx=<id>:<D<sender>|C|S>,...` and
/// `slot=<t> tx=- rx=-` for the quiescent slot.
RunResult run(const ScenarioConfig& cfg);

/// Same protocol logic over a contention MAC without capture or constructive
/// interference. Slot fields count transmission epochs; latency is wall time,
/// one slot of air time per epoch plus the backoff that preceded it.
RunResult run_baseline(const ScenarioConfig& cfg);

struct SweepRow {
  int count = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  MacMode mac = MacMode::L3;
  int last_tx_slot = 0;
  int quiescent_slot = 0;
  double latency_ms = 0.0;
  bool converged = false;
};

/// Per-trial sub-seed derived from the master seed, vehicle count and trial.
std::uint64_t derive_seed(std::uint64_t master, int count, int trial);

/// Runs `trials` random placements of `base` per vehicle count. Every trial
/// reuses `base` with its placement count and seed replaced.
std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::vector<int>& counts, int trials,
                            std::uint64_t master_seed);

/// Default random placement for sweeps: a 70 m box centered in zone (0,0)
/// so that every pair of vehicles is within the default radio range.
RandomPlacement default_sweep_placement(const GridConfig& grid, int count);

/// Header plus one line per row: count,trial,seed,mac,last_tx_slot,
/// quiescent_slot,latency_ms,converged.
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct SweepSummary {
  int count = 0;
  MacMode mac = MacMode::L3;
  double mean_slots = 0.0;
  int min_slots = 0;
  int max_slots = 0;
  double mean_latency_ms = 0.0;
  int converged_trials = 0;
  int trials = 0;
};

std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows);

/// Named experiment: vehicle counts, trials per count and the MACs to run.
struct SweepPreset {
  std::string name;
  std::vector<int> counts;
  int trials = 20;
  std::vector<MacMode> macs;
};

/// paper-fig7 (3..15 vehicles, capture MAC), paper-fig8 (3..15, both MACs),
/// paper-fig9 (15..225, both MACs).
std::optional<SweepPreset> find_preset(const std::string& name);

/// Scenario the presets start from: defaults with vehicle 1 as the only
/// initiator.
ScenarioConfig preset_base();

/// Sweep of every MAC of `preset` over `base`, rows grouped by MAC.
std::vector<SweepRow> run_preset(const SweepPreset& preset, ScenarioConfig base, std::uint64_t master_seed);

/// Single-run metrics as a two-line CSV.
std::string metrics_csv(const RunMetrics& m);

}  // namespace l3
