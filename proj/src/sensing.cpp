#include "l3/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "l3/error.hpp"

namespace l3 {

std::string token(BlockState s) {
  const auto b = bits(s);
  return {static_cast<char>('0' + ((b >> 1) & 1)), static_cast<char>('0' + (b & 1))};
}

SensingMatrix::SensingMatrix(ZoneIndex zone, int rows, int cols, BlockState fill)
    : zone_(zone), rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) throw SizeError("matrix dimensions must be positive");
  cells_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
}

namespace {

std::vector<std::uint8_t> pack(std::span<const BlockState> cells) {
  std::vector<std::uint8_t> out((cells.size() + 3) / 4, 0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const int shift = 6 - 2 * static_cast<int>(i % 4);
    out[i / 4] = static_cast<std::uint8_t>(out[i / 4] | (bits(cells[i]) << shift));
  }
  return out;
}

SensingMatrix unpack(std::span<const std::uint8_t> bytes, ZoneIndex zone, int rows, int cols,
                     std::size_t expected_len) {
  const std::size_t count = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (bytes.size() != expected_len) {
    throw SizeError("payload of " + std::to_string(bytes.size()) + " bytes does not match a " +
                    std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
  }
  SensingMatrix mat(zone, rows, cols);
  auto cells = mat.cells();
  for (std::size_t i = 0; i < count; ++i) {
    const int shift = 6 - 2 * static_cast<int>(i % 4);
    cells[i] = block_state_from_bits(static_cast<std::uint8_t>(bytes[i / 4] >> shift));
  }
  return mat;
}

std::size_t cell_count(int rows, int cols) {
  if (rows <= 0 || cols <= 0) throw SizeError("matrix dimensions must be positive");
  return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
}

}  // namespace

std::vector<std::uint8_t> encode(const SensingMatrix& mat) {
  if (mat.size() % 4 != 0) {
    throw SizeError("matrix of " + std::to_string(mat.size()) + " cells does not pack into whole bytes");
  }
  return pack(mat.cells());
}

SensingMatrix decode(std::span<const std::uint8_t> bytes, ZoneIndex zone, int rows, int cols) {
  const std::size_t count = cell_count(rows, cols);
  if (count % 4 != 0) {
    throw SizeError(std::to_string(rows) + "x" + std::to_string(cols) +
                    " matrix does not pack into whole bytes");
  }
  return unpack(bytes, zone, rows, cols, count / 4);
}

std::vector<std::uint8_t> encode_frame(const SensingMatrix& mat) { return pack(mat.cells()); }

SensingMatrix decode_frame(std::span<const std::uint8_t> bytes, ZoneIndex zone, int rows, int cols) {
  return unpack(bytes, zone, rows, cols, (cell_count(rows, cols) + 3) / 4);
}

AggregateResult aggregate(const SensingMatrix& current, const SensingMatrix& received) {
  if (current.zone() != received.zone()) {
    throw IncompatibleMatrix("received matrix belongs to a different zone");
  }
  if (current.rows() != received.rows() || current.cols() != received.cols()) {
    throw IncompatibleMatrix("matrix dimensions differ");
  }
  AggregateResult result{current, false};
  auto out = result.matrix.cells();
  const auto in = received.cells();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const BlockState merged = merge_cell(out[i], in[i]);
    if (merged != out[i]) {
      out[i] = merged;
      result.changed = true;
    }
  }
  return result;
}

bool has_uncertain(const SensingMatrix& mat) {
  const auto cells = mat.cells();
  return std::find(cells.begin(), cells.end(), BlockState::Uncertain) != cells.end();
}

bool same_information(const SensingMatrix& a, const SensingMatrix& b) {
  if (a.zone() != b.zone() || a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const auto ca = a.cells();
  const auto cb = b.cells();
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (is_sensed(ca[i]) != is_sensed(cb[i])) return false;
    if (is_sensed(ca[i]) && ca[i] != cb[i]) return false;
  }
  return true;
}

void GroundTruth::validate() const {
  for (const auto& o : objects) {
    if (!(o.radius > 0.0)) throw InvalidInput("object radius must be positive");
  }
  for (const auto& v : vehicles) {
    if (!(v.body.radius > 0.0)) {
      throw InvalidInput("vehicle " + std::to_string(v.id) + " radius must be positive");
    }
  }
}

bool segment_hits_disc(Position a, Position b, const Disc& d) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((d.center.x - a.x) * dx + (d.center.y - a.y) * dy) / len2, 0.0, 1.0);
  }
  const double px = a.x + t * dx - d.center.x;
  const double py = a.y + t * dy - d.center.y;
  return px * px + py * py < d.radius * d.radius;
}

SensingMatrix perceive(VehicleId self, Position self_pos, const GroundTruth& world, ZoneIndex zone,
                       const GridConfig& grid, double sensing_range) {
  const BlockIndex self_block = locate_block(self_pos, zone, grid);
  const int n = grid.blocks_per_side();

  // Every disc other than the observer, tagged with the block holding its
  // center (or none when the center lies in another zone).
  struct Occluder {
    Disc disc;
    bool in_zone;
    BlockIndex block;
  };
  std::vector<Occluder> occluders;
  occluders.reserve(world.objects.size() + world.vehicles.size());
  auto add = [&](const Disc& d) {
    const bool in_zone = locate_zone(d.center, grid) == zone;
    occluders.push_back({d, in_zone, in_zone ? locate_block(d.center, zone, grid) : BlockIndex{}});
  };
  for (const auto& o : world.objects) add(o);
  for (const auto& v : world.vehicles) {
    if (v.id != self) add(v.body);
  }

  SensingMatrix mat(zone, n, n);
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      const BlockIndex b{col, row};
      if (b == self_block) {
        mat(row, col) = BlockState::ObjectDetected;
        continue;
      }
      const Position c = block_center(zone, b, grid);
      if (distance(c, self_pos) > sensing_range) {
        mat(row, col) = BlockState::OutOfSensing;
        continue;
      }
      bool blocked = false;
      bool occupied = false;
      for (const auto& o : occluders) {
        if (o.in_zone && o.block == b) {
          occupied = true;
        } else if (segment_hits_disc(self_pos, c, o.disc)) {
          blocked = true;
          break;
        }
      }
      if (blocked) {
        mat(row, col) = BlockState::Uncertain;
      } else {
        mat(row, col) = occupied ? BlockState::ObjectDetected : BlockState::NoObject;
      }
    }
  }
  return mat;
}

std::string format_matrix(const SensingMatrix& mat) {
  std::ostringstream os;
  for (int row = 0; row < mat.rows(); ++row) {
    for (int col = 0; col < mat.cols(); ++col) {
      if (col) os << ' ';
      os << token(mat(row, col));
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace l3
