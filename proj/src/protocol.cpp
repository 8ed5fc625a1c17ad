#include "l3/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "l3/error.hpp"

namespace l3 {

void AccessConfig::validate() const {
  if (!(fresh > 0.0) || !std::isfinite(fresh)) throw InvalidInput("fresh_persistence must be positive");
  if (!(retry > 0.0) || !std::isfinite(retry)) throw InvalidInput("retry_persistence must be positive");
  if (!(retry_cap > 0.0 && retry_cap <= 1.0)) throw InvalidInput("retry_cap must lie in (0, 1]");
  if (!(idle_growth >= 1.0) || !std::isfinite(idle_growth)) throw InvalidInput("idle_growth must be >= 1");
}

VehicleState init_vehicle(VehicleId id, Position pos, const GroundTruth& world, const GridConfig& grid,
                          double sensing_range, std::optional<bool> initiator) {
  VehicleState v;
  v.id = id;
  v.position = pos;
  v.matrix = perceive(id, pos, world, locate_zone(pos, grid), grid, sensing_range);
  v.pending_tx = initiator.value_or(has_uncertain(v.matrix));
  v.fresh = v.pending_tx;
  return v;
}

std::optional<Transmission> on_slot_begin(VehicleState& v) {
  if (!v.pending_tx) return std::nullopt;
  v.pending_tx = false;
  v.fresh = false;
  v.idle_streak = 0;
  ++v.tx_slots;
  return Transmission{v.id, v.position, Packet{v.id, v.matrix.zone(), encode_frame(v.matrix)}};
}

void on_delivery(VehicleState& v, const Packet& pkt, bool contested) {
  ++v.rx_slots;
  v.idle_streak = 0;
  if (pkt.zone != v.matrix.zone()) {
    ++v.dropped_cross_zone;
    return;
  }
  SensingMatrix received;
  try {
    received = decode_frame(pkt.payload, pkt.zone, v.matrix.rows(), v.matrix.cols());
  } catch (const SizeError&) {
    ++v.protocol_errors;
    return;
  }
  auto [merged, changed] = aggregate(v.matrix, received);
  const bool behind = aggregate(received, merged).changed;
  v.matrix = std::move(merged);

  if (!changed && !behind && !contested) {
    v.pending_tx = false;
    v.fresh = false;
    return;
  }
  if (changed && (behind || contested)) {
    v.pending_tx = true;
    v.fresh = true;
  } else if (behind || contested) {
    v.pending_tx = true;
  }
}

void on_collision(VehicleState& v) {
  ++v.collisions;
  v.idle_streak = 0;
  v.pending_tx = true;
}

void on_silence(VehicleState& v) { ++v.idle_streak; }

double access_probability(const VehicleState& v, int neighbors, const AccessConfig& cfg) {
  const double base = std::min(1.0, (v.fresh ? cfg.fresh : cfg.retry) / std::max(1, neighbors));
  const double ceiling = v.fresh ? 1.0 : cfg.retry_cap;
  if (base >= ceiling) return base;
  return std::min(ceiling, base * std::pow(cfg.idle_growth, std::min(v.idle_streak, 64)));
}

bool all_matrices_equal(std::span<const VehicleState> all) {
  return std::all_of(all.begin(), all.end(),
                     [&](const VehicleState& v) { return same_information(v.matrix, all.front().matrix); });
}

bool is_globally_converged(std::span<const VehicleState> all, bool last_slot_had_tx) {
  if (last_slot_had_tx) return false;
  if (std::any_of(all.begin(), all.end(), [](const VehicleState& v) { return v.pending_tx; })) {
    return false;
  }
  return all_matrices_equal(all);
}

}  // namespace l3
