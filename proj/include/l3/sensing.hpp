#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "l3/grid.hpp"

namespace l3 {

using VehicleId = std::int32_t;

/// Two-bit block state b1b0. b1 says whether the block was sensed, b0 carries
/// the content (object present) or, for unsensed blocks, whether the view was
/// blocked.
enum class BlockState : std::uint8_t {
  OutOfSensing = 0b00,
  Uncertain = 0b01,
  NoObject = 0b10,
  ObjectDetected = 0b11,
};

constexpr std::uint8_t bits(BlockState s) { return static_cast<std::uint8_t>(s); }
constexpr bool is_sensed(BlockState s) { return (bits(s) & 0b10) != 0; }
constexpr bool low_bit(BlockState s) { return (bits(s) & 0b01) != 0; }
constexpr BlockState block_state_from_bits(std::uint8_t b) { return static_cast<BlockState>(b & 0b11); }

/// "00", "01", "10" or "11".
std::string token(BlockState s);

/// m x n grid of block states for one zone. Cells are stored row-major with
/// (row 0, col 0) the south-west block of the zone.
class SensingMatrix {
 public:
  SensingMatrix() = default;
  SensingMatrix(ZoneIndex zone, int rows, int cols, BlockState fill = BlockState::OutOfSensing);

  ZoneIndex zone() const { return zone_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return cells_.size(); }

  BlockState operator()(int row, int col) const { return cells_[index(row, col)]; }
  BlockState& operator()(int row, int col) { return cells_[index(row, col)]; }
  BlockState at(BlockIndex b) const { return (*this)(b.row, b.col); }

  std::span<const BlockState> cells() const { return cells_; }
  std::span<BlockState> cells() { return cells_; }

  friend bool operator==(const SensingMatrix&, const SensingMatrix&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(col);
  }

  ZoneIndex zone_{};
  int rows_ = 0;
  int cols_ = 0;
  std::vector<BlockState> cells_;
};

/// Packs cells row-major, four per byte, earliest cell in the two most
/// significant bits, b1 above b0. Throws SizeError unless rows*cols is a
/// multiple of 4.
std::vector<std::uint8_t> encode(const SensingMatrix& mat);

/// Inverse of encode. Throws SizeError when `bytes` is not rows*cols/4 long.
SensingMatrix decode(std::span<const std::uint8_t> bytes, ZoneIndex zone, int rows, int cols);

/// Wire frame of a matrix: encode() with the last byte zero-padded when
/// rows*cols is not a multiple of 4. Identical to encode() otherwise.
std::vector<std::uint8_t> encode_frame(const SensingMatrix& mat);

/// Inverse of encode_frame. Throws SizeError on a length other than
/// ceil(rows*cols/4) bytes.
SensingMatrix decode_frame(std::span<const std::uint8_t> bytes, ZoneIndex zone, int rows, int cols);

/// Per-cell fusion rule: an unsensed cell takes any sensed report, two sensed
/// reports that disagree become Uncertain, anything else keeps `current`.
constexpr BlockState merge_cell(BlockState current, BlockState received) {
  if (is_sensed(received) && !is_sensed(current)) return received;
  if (is_sensed(received) && is_sensed(current) && low_bit(received) != low_bit(current)) {
    return BlockState::Uncertain;
  }
  return current;
}

struct AggregateResult {
  SensingMatrix matrix;
  bool changed = false;
};

/// Fuses `received` into `current` cell by cell. `changed` is true iff some
/// cell ends with a different value. Throws IncompatibleMatrix on zone or
/// dimension mismatch.
AggregateResult aggregate(const SensingMatrix& current, const SensingMatrix& received);

bool has_uncertain(const SensingMatrix& mat);

/// Same zone and dimensions, the same set of sensed cells, and equal values on
/// them. Unsensed cells may differ between OutOfSensing and Uncertain, which
/// fusion never reconciles.
bool same_information(const SensingMatrix& a, const SensingMatrix& b);

struct Disc {
  Position center;
  double radius = 1.0;

  friend bool operator==(const Disc&, const Disc&) = default;
};

struct VehicleBody {
  VehicleId id = 0;
  Disc body;

  friend bool operator==(const VehicleBody&, const VehicleBody&) = default;
};

/// Scenario world: static objects plus the vehicles themselves, all discs.
/// Every disc occludes and occupies the block holding its center.
struct GroundTruth {
  std::vector<Disc> objects;
  std::vector<VehicleBody> vehicles;

  void validate() const;
};

/// Synthetic perception of the zone from `self_pos`.
///
/// For each block center c: beyond `sensing_range` is OutOfSensing; a segment
/// self->c passing through any other disc (one whose center is not inside the
/// target block) is Uncertain; otherwise ObjectDetected when a disc center lies
/// in the block, NoObject when none does. The observer's own block is
/// ObjectDetected. Throws OutOfZone when `self_pos` lies outside `zone`.
SensingMatrix perceive(VehicleId self, Position self_pos, const GroundTruth& world, ZoneIndex zone,
                       const GridConfig& grid, double sensing_range);

/// True iff the segment a->b comes strictly closer than `d.radius` to the
/// disc center.
bool segment_hits_disc(Position a, Position b, const Disc& d);

/// Matrix as `rows` lines of `cols` space-separated two-bit tokens, row 0
/// first.
std::string format_matrix(const SensingMatrix& mat);

}  // namespace l3
