#include "l3/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "l3/error.hpp"

namespace l3 {

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

void GridConfig::validate() const {
  if (!(zone_side > 0.0) || !std::isfinite(zone_side)) {
    throw InvalidInput("zone_side must be positive");
  }
  if (!(block_side > 0.0) || !std::isfinite(block_side)) {
    throw InvalidInput("block_side must be positive");
  }
  if (!std::isfinite(origin.x) || !std::isfinite(origin.y)) {
    throw InvalidInput("grid origin must be finite");
  }
  const double ratio = zone_side / block_side;
  if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    std::ostringstream os;
    os << "zone_side " << zone_side << " is not an integer multiple of block_side " << block_side;
    throw InvalidInput(os.str());
  }
}

int GridConfig::blocks_per_side() const {
  return static_cast<int>(std::llround(zone_side / block_side));
}

ZoneIndex locate_zone(Position p, const GridConfig& grid) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw InvalidInput("position must be finite");
  }
  return ZoneIndex{static_cast<std::int64_t>(std::floor((p.x - grid.origin.x) / grid.zone_side)),
                   static_cast<std::int64_t>(std::floor((p.y - grid.origin.y) / grid.zone_side))};
}

Position zone_origin(ZoneIndex zone, const GridConfig& grid) {
  return {grid.origin.x + static_cast<double>(zone.col) * grid.zone_side,
          grid.origin.y + static_cast<double>(zone.row) * grid.zone_side};
}

BlockIndex locate_block(Position p, ZoneIndex zone, const GridConfig& grid) {
  if (locate_zone(p, grid) != zone) {
    std::ostringstream os;
    os << "position (" << p.x << ", " << p.y << ") is outside zone (" << zone.col << ", "
       << zone.row << ")";
    throw OutOfZone(os.str());
  }
  const Position o = zone_origin(zone, grid);
  const int n = grid.blocks_per_side();
  // Rounding near the upper edge can land on n; the zone check above already
  // established membership.
  const int col = std::clamp(static_cast<int>(std::floor((p.x - o.x) / grid.block_side)), 0, n - 1);
  const int row = std::clamp(static_cast<int>(std::floor((p.y - o.y) / grid.block_side)), 0, n - 1);
  return BlockIndex{col, row};
}

ZoneIndex resident_zone(std::optional<ZoneIndex> prev, Position p, const GridConfig& grid) {
  const ZoneIndex now = locate_zone(p, grid);
  if (prev && *prev == now) return *prev;
  return now;
}

Position block_center(ZoneIndex zone, BlockIndex block, const GridConfig& grid) {
  const Position o = zone_origin(zone, grid);
  return {o.x + (block.col + 0.5) * grid.block_side, o.y + (block.row + 0.5) * grid.block_side};
}

}  // namespace l3
