#pragma once

#include <vector>

#include "l3/sim.hpp"

namespace l3::detail {

/// Validated, perceived vehicles ready for a run. `neighbors[i]` counts the
/// vehicles within radio range of `vehicles[i]`.
struct Fleet {
  std::vector<VehicleState> vehicles;
  std::vector<Receiver> receivers;
  std::vector<int> neighbors;
};

Fleet prepare_fleet(const ScenarioConfig& cfg);

/// Copies per-vehicle tallies, the final matrix and states into `result`.
void finish(RunResult& result, const std::vector<VehicleState>& vehicles);

}  // namespace l3::detail
