#pragma once

#include <optional>
#include <span>

#include "l3/channel.hpp"
#include "l3/grid.hpp"
#include "l3/sensing.hpp"

namespace l3 {

/// Slot-access persistence. An armed vehicle with `k` neighbors in radio
/// range transmits in a slot with probability min(1, c / k), where c is
/// `fresh` when its matrix holds news it has not sent yet and `retry`
/// otherwise. Every silent slot multiplies that probability by `idle_growth`,
/// up to 1 for fresh news and `retry_cap` for retries.
struct AccessConfig {
  double fresh = 3.0;
  double retry = 1.0;
  double retry_cap = 0.5;
  double idle_growth = 2.0;

  void validate() const;

  friend bool operator==(const AccessConfig&, const AccessConfig&) = default;
};

struct VehicleState {
  VehicleId id = 0;
  Position position{};
  SensingMatrix matrix;
  bool pending_tx = false;
  /// The armed transmission carries information the vehicle never sent.
  bool fresh = false;
  /// Consecutive slots in which the vehicle heard nothing at all.
  int idle_streak = 0;
  int tx_slots = 0;
  int rx_slots = 0;
  int protocol_errors = 0;
  int dropped_cross_zone = 0;
  int collisions = 0;
};

/// Perceives the vehicle's zone and arms a transmission when the matrix holds
/// an Uncertain block. `initiator` overrides that decision when set.
VehicleState init_vehicle(VehicleId id, Position pos, const GroundTruth& world, const GridConfig& grid,
                          double sensing_range, std::optional<bool> initiator = std::nullopt);

/// Emits the current matrix when a transmission is armed, and disarms it.
std::optional<Transmission> on_slot_begin(VehicleState& v);

/// Fuses a delivered packet. A packet for another zone is dropped, a payload
/// of the wrong length is dropped and counted in `protocol_errors`.
///
/// Arming, with `behind` meaning the sender's matrix lacks something the
/// fused local matrix holds:
///  - nothing changed, sender not behind, clean reception: the sender already
///    said everything we would say, so a pending transmission is cancelled;
///  - local matrix changed and (sender behind or reception contested): arm
///    fresh news;
///  - otherwise sender behind or reception contested: arm a retry;
///  - local matrix changed to exactly the sender's: no new arming, the
///    sender's broadcast already reached our neighborhood.
/// `contested` marks a frame decoded by capture over other signals, which
/// means some neighbors missed frames this vehicle may now summarize.
void on_delivery(VehicleState& v, const Packet& pkt, bool contested = false);

/// Overlapping frames nobody could decode: arm a retry to draw them out again.
void on_collision(VehicleState& v);

/// The slot was silent for this vehicle.
void on_silence(VehicleState& v);

/// Transmission probability of an armed vehicle with `neighbors` in range.
double access_probability(const VehicleState& v, int neighbors, const AccessConfig& cfg);

/// Omniscient completion check: nothing armed, the last slot silent, and all
/// vehicles holding the same information.
bool is_globally_converged(std::span<const VehicleState> all, bool last_slot_had_tx);

bool all_matrices_equal(std::span<const VehicleState> all);

}  // namespace l3
