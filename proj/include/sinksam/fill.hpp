#pragma once

// Depression filling by priority-flood.
//
// Outlets are valid cells on the grid edge or 8-adjacent to a nodata cell.
// They seed a min-priority queue keyed on (elevation, insertion order); cells
// are then reached inward in order of their spill level. A neighbour lower
// than or equal to the cell that reaches it is raised to that level and goes
// through a FIFO "pit" queue instead of the heap, which keeps the common
// in-depression case O(1) per cell. Flats are left flat.

#include <array>
#include <cstdint>
#include <queue>
#include <vector>

#include "sinksam/error.hpp"
#include "sinksam/raster.hpp"
#include "sinksam/raster_ops.hpp"

namespace sinksam {

template <typename Scalar>
struct FilledResult {
  Raster<Scalar> filled;  ///< Depression-free surface, >= original on valid cells.
  Raster<Scalar> depth;   ///< filled - original; nodata where the input is nodata.
};

namespace detail {

inline constexpr std::array<int, 8> kD8Row = {-1, -1, -1, 0, 0, 1, 1, 1};
inline constexpr std::array<int, 8> kD8Col = {-1, 0, 1, -1, 1, -1, 0, 1};

/// True for valid cells that drain directly off the grid or into nodata.
template <typename Scalar>
bool is_outlet(const Raster<Scalar>& dem, Index r, Index c) {
  if (dem.is_nodata(r, c)) return false;
  if (r == 0 || c == 0 || r == dem.height() - 1 || c == dem.width() - 1) return true;
  for (int k = 0; k < 8; ++k) {
    if (dem.is_nodata(r + kD8Row[k], c + kD8Col[k])) return true;
  }
  return false;
}

template <typename Scalar>
struct FloodNode {
  Scalar level;
  std::uint64_t order;
  Index cell;
};

template <typename Scalar>
struct FloodNodeAfter {
  bool operator()(const FloodNode<Scalar>& a, const FloodNode<Scalar>& b) const noexcept {
    if (a.level != b.level) return a.level > b.level;
    return a.order > b.order;
  }
};

}  // namespace detail

/// Fills every closed depression of `dem` up to its spill elevation.
///
/// Throws InputError when the raster has no valid cell to act as an outlet.
template <typename Scalar>
FilledResult<Scalar> fill_depressions(const Raster<Scalar>& dem) {
  const Index rows = dem.height();
  const Index cols = dem.width();
  Raster<Scalar> filled = dem;
  std::vector<std::uint8_t> closed(static_cast<std::size_t>(dem.size()), 0);

  std::priority_queue<detail::FloodNode<Scalar>, std::vector<detail::FloodNode<Scalar>>,
                      detail::FloodNodeAfter<Scalar>>
      open;
  std::queue<Index> pit;
  std::uint64_t order = 0;

  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      if (!detail::is_outlet(dem, r, c)) continue;
      const Index i = r * cols + c;
      closed[i] = 1;
      open.push({dem[i], order++, i});
    }
  }
  if (open.empty()) throw InputError("fill_depressions: raster has no valid outlet cell");

  while (!open.empty() || !pit.empty()) {
    Index cell;
    if (!pit.empty()) {
      cell = pit.front();
      pit.pop();
    } else {
      cell = open.top().cell;
      open.pop();
    }
    const Index r = cell / cols;
    const Index c = cell % cols;
    const Scalar level = filled[cell];
    for (int k = 0; k < 8; ++k) {
      const Index nr = r + detail::kD8Row[k];
      const Index nc = c + detail::kD8Col[k];
      if (nr < 0 || nc < 0 || nr >= rows || nc >= cols) continue;
      const Index n = nr * cols + nc;
      if (closed[n] || filled.is_nodata(n)) continue;
      closed[n] = 1;
      if (filled[n] <= level) {
        filled[n] = level;
        pit.push(n);
      } else {
        open.push({filled[n], order++, n});
      }
    }
  }

  Raster<Scalar> depth = subtract(filled, dem);
  return {std::move(filled), std::move(depth)};
}

/// Depth of closed depressions: fill_depressions(dem).depth.
template <typename Scalar>
Raster<Scalar> depression_depth(const Raster<Scalar>& dem) {
  return fill_depressions(dem).depth;
}

}  // namespace sinksam
