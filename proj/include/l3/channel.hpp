#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <variant>
#include <vector>

#include "l3/grid.hpp"
#include "l3/sensing.hpp"

namespace l3 {

struct ChannelConfig {
  double comm_range = 100.0;
  double capture_threshold_db = 3.0;
  double path_loss_exponent = 2.0;
  double reference_power_db = 0.0;

  void validate() const;

  friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

/// One broadcast frame: the sender, the zone its matrix describes and the
/// encoded matrix.
struct Packet {
  VehicleId sender = 0;
  ZoneIndex zone{};
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Packet&, const Packet&) = default;
};

struct Transmission {
  VehicleId sender = 0;
  Position sender_pos{};
  Packet packet;
};

struct Receiver {
  VehicleId id = 0;
  Position pos{};
};

struct Silence {
  friend bool operator==(const Silence&, const Silence&) = default;
};
struct Collision {
  friend bool operator==(const Collision&, const Collision&) = default;
};
struct Delivered {
  Packet packet;
  /// Decoded by capture over at least one other in-range signal.
  bool contested = false;
  friend bool operator==(const Delivered&, const Delivered&) = default;
};

using Reception = std::variant<Silence, Collision, Delivered>;

struct ChannelOutcome {
  std::map<VehicleId, Reception> per_receiver;

  const Reception& at(VehicleId id) const { return per_receiver.at(id); }
};

/// Log-distance path loss: reference_power - 10 * exponent * log10(d).
/// Throws DegenerateGeometry when the two positions coincide.
double received_power_db(Position tx, Position rx, const ChannelConfig& cfg);

/// Decides what each receiver decodes in a slot of simultaneous broadcasts.
///
/// Frames with identical zone and payload interfere constructively and are
/// treated as one signal at the strength of their nearest member. Signals
/// whose nearest member is out of range are ignored. A lone remaining signal
/// is delivered; among several, the strongest is delivered only if it beats
/// the linear sum of the rest by `capture_threshold_db`. Senders are half
/// duplex and always get Silence. Throws InvalidSlot on duplicate senders.
ChannelOutcome resolve_slot(std::span<const Transmission> txs, std::span<const Receiver> receivers,
                            const ChannelConfig& cfg);

}  // namespace l3
