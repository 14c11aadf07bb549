#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <utility>

#include "sinksam/error.hpp"

namespace sinksam {

using Index = Eigen::Index;

/// Row-major dense grid; row 0 is the top (north) raster row.
template <typename Scalar>
using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kDefaultNodata = -9999.0;

/// Map placement of a grid: lower-left corner and square cell size.
struct GeoTransform {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double cellsize = 1.0;

  friend bool operator==(const GeoTransform&, const GeoTransform&) = default;
};

/// A georeferenced grid of real values with an exact-match nodata sentinel.
template <typename Scalar>
class Raster {
 public:
  using scalar_type = Scalar;

  Raster() : Raster(0, 0) {}

  Raster(Index height, Index width, Scalar fill = Scalar(0),
         Scalar nodata = Scalar(kDefaultNodata), GeoTransform geo = {})
      : values_(Grid<Scalar>::Constant(height, width, fill)), nodata_(nodata), geo_(geo) {
    check_geo();
  }

  Raster(Grid<Scalar> values, Scalar nodata = Scalar(kDefaultNodata), GeoTransform geo = {})
      : values_(std::move(values)), nodata_(nodata), geo_(geo) {
    check_geo();
  }

  Index width() const noexcept { return values_.cols(); }
  Index height() const noexcept { return values_.rows(); }
  Index size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.size() == 0; }

  Scalar nodata() const noexcept { return nodata_; }
  const GeoTransform& geo() const noexcept { return geo_; }
  void set_geo(const GeoTransform& geo) {
    geo_ = geo;
    check_geo();
  }

  const Grid<Scalar>& values() const noexcept { return values_; }
  Grid<Scalar>& values() noexcept { return values_; }

  Scalar operator()(Index row, Index col) const { return values_(row, col); }
  Scalar& operator()(Index row, Index col) { return values_(row, col); }

  /// Linear (row-major) access.
  Scalar operator[](Index i) const { return values_.data()[i]; }
  Scalar& operator[](Index i) { return values_.data()[i]; }

  bool is_nodata(Index row, Index col) const { return values_(row, col) == nodata_; }
  bool is_nodata(Index i) const { return values_.data()[i] == nodata_; }

  /// Mask of cells whose value is not the sentinel.
  auto valid_mask() const { return values_ != nodata_; }

  bool same_shape(const Raster& other) const noexcept {
    return width() == other.width() && height() == other.height();
  }

  /// Bit-level equality of cells, sentinel and georeferencing.
  friend bool operator==(const Raster& a, const Raster& b) {
    return a.same_shape(b) && a.nodata_ == b.nodata_ && a.geo_ == b.geo_ &&
           (a.values_ == b.values_).all();
  }

 private:
  void check_geo() const {
    if (!(geo_.cellsize > 0.0)) throw InputError("raster cellsize must be strictly positive");
  }

  Grid<Scalar> values_;
  Scalar nodata_;
  GeoTransform geo_;
};

using RasterD = Raster<double>;
using RasterF = Raster<float>;

/// Boolean grid used for ground truth and predicted masks.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(Index height, Index width, bool fill = false)
      : bits_(Grid<bool>::Constant(height, width, fill)) {}
  explicit BinaryMask(Grid<bool> bits) : bits_(std::move(bits)) {}

  Index width() const noexcept { return bits_.cols(); }
  Index height() const noexcept { return bits_.rows(); }
  Index size() const noexcept { return bits_.size(); }

  const Grid<bool>& bits() const noexcept { return bits_; }
  Grid<bool>& bits() noexcept { return bits_; }

  bool operator()(Index row, Index col) const { return bits_(row, col); }
  bool& operator()(Index row, Index col) { return bits_(row, col); }
  bool operator[](Index i) const { return bits_.data()[i]; }
  bool& operator[](Index i) { return bits_.data()[i]; }

  Index count() const { return bits_.count(); }

  bool same_shape(const BinaryMask& other) const noexcept {
    return width() == other.width() && height() == other.height();
  }

  friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
    return a.same_shape(b) && (a.bits_ == b.bits_).all();
  }

 private:
  Grid<bool> bits_;
};

/// Cells with a strictly positive value; nodata cells are never set.
template <typename Scalar>
BinaryMask positive_mask(const Raster<Scalar>& raster) {
  return BinaryMask(Grid<bool>((raster.values() > Scalar(0)) && raster.valid_mask()));
}

}  // namespace sinksam
