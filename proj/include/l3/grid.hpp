#pragma once

#include <compare>
#include <cstdint>
#include <optional>

namespace l3 {

/// World position in meters on the shared digital map.
struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

double distance(Position a, Position b);

/// Zone / block geometry of the pre-shared map.
///
/// Zones are square cells of side `zone_side` anchored at `origin`; each zone
/// is split into (zone_side / block_side)^2 square blocks. Cells are
/// half-open: [k*side, (k+1)*side).
struct GridConfig {
  double zone_side = 100.0;
  double block_side = 5.0;
  Position origin{};

  /// Throws InvalidInput unless both sides are positive and zone_side is an
  /// integer multiple of block_side.
  void validate() const;

  /// Blocks along one side of a zone (n == m, the grid is square).
  int blocks_per_side() const;

  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct ZoneIndex {
  std::int64_t col = 0;
  std::int64_t row = 0;

  friend auto operator<=>(const ZoneIndex&, const ZoneIndex&) = default;
};

struct BlockIndex {
  int col = 0;
  int row = 0;

  friend auto operator<=>(const BlockIndex&, const BlockIndex&) = default;
};

ZoneIndex locate_zone(Position p, const GridConfig& grid);

/// Block of `p` inside zone `zone`; throws OutOfZone if `p` lies elsewhere.
BlockIndex locate_block(Position p, ZoneIndex zone, const GridConfig& grid);

/// Zone a vehicle resides in. Vehicles are modeled by their center point, so
/// a vehicle that has not left `prev` keeps it and otherwise moves to the
/// zone containing `p`.
ZoneIndex resident_zone(std::optional<ZoneIndex> prev, Position p, const GridConfig& grid);

Position zone_origin(ZoneIndex zone, const GridConfig& grid);
Position block_center(ZoneIndex zone, BlockIndex block, const GridConfig& grid);

}  // namespace l3
