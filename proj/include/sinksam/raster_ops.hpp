#pragma once

#include <limits>

#include "sinksam/error.hpp"
#include "sinksam/raster.hpp"

namespace sinksam {

/// Cell-wise a - b. A nodata cell in either input yields the nodata of `a`.
template <typename Scalar>
Raster<Scalar> subtract(const Raster<Scalar>& a, const Raster<Scalar>& b) {
  if (!a.same_shape(b)) throw ShapeError("subtract: raster dimensions differ");
  if (!(a.geo() == b.geo())) throw ShapeError("subtract: raster geotransforms differ");
  const auto valid = a.valid_mask() && b.valid_mask();
  Grid<Scalar> out = valid.select(a.values() - b.values(), a.nodata());
  return Raster<Scalar>(std::move(out), a.nodata(), a.geo());
}

/// Turns a depth map (larger = farther) into an elevation-like surface:
/// max_valid(depth) - depth on valid cells.
template <typename Scalar>
Raster<Scalar> invert_depth(const Raster<Scalar>& depth) {
  const auto valid = depth.valid_mask();
  if (!valid.any()) throw InputError("invert_depth: raster has no valid cells");
  const Scalar peak = valid.select(depth.values(), -std::numeric_limits<Scalar>::infinity()).maxCoeff();
  Grid<Scalar> out = valid.select(peak - depth.values(), depth.nodata());
  return Raster<Scalar>(std::move(out), depth.nodata(), depth.geo());
}

}  // namespace sinksam
