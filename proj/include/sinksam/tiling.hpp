#pragma once

// Overlapping square tiles over a mosaic, and stitching per-tile results back.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sinksam/error.hpp"
#include "sinksam/image.hpp"
#include "sinksam/raster.hpp"

namespace sinksam {

struct TileSpec {
  Index patch = 512;
  Index stride = 256;
};

/// Square window of side `patch` whose top-left mosaic pixel is (row0, col0).
struct TileWindow {
  Index row0 = 0;
  Index col0 = 0;
  Index patch = 0;

  friend bool operator==(const TileWindow&, const TileWindow&) = default;
};

/// Window origins along one axis: 0, stride, 2*stride, ... with the last one
/// shifted to size - patch so the axis is covered exactly.
std::vector<Index> plan_axis(Index size, const TileSpec& spec);

/// All windows, row origins outer, column origins inner.
std::vector<TileWindow> plan_tiles(Index mosaic_width, Index mosaic_height, const TileSpec& spec);

/// Stable identifier used for per-patch files, e.g. "r00256_c00488".
std::string tile_id(const TileWindow& window);

/// Geotransform of the window inside a mosaic of the given height.
GeoTransform window_geo(const GeoTransform& mosaic, Index mosaic_height, const TileWindow& window);

namespace detail {
inline void check_window(Index width, Index height, const TileWindow& w) {
  if (w.patch <= 0 || w.row0 < 0 || w.col0 < 0 || w.row0 + w.patch > height ||
      w.col0 + w.patch > width) {
    throw ShapeError("tile window (" + std::to_string(w.row0) + "," + std::to_string(w.col0) +
                     ") of size " + std::to_string(w.patch) + " exceeds " + std::to_string(width) +
                     "x" + std::to_string(height) + " mosaic");
  }
}
}  // namespace detail

template <typename Scalar>
Raster<Scalar> extract_tile(const Raster<Scalar>& mosaic, const TileWindow& w) {
  detail::check_window(mosaic.width(), mosaic.height(), w);
  return Raster<Scalar>(Grid<Scalar>(mosaic.values().block(w.row0, w.col0, w.patch, w.patch)),
                        mosaic.nodata(), window_geo(mosaic.geo(), mosaic.height(), w));
}

inline BinaryMask extract_tile(const BinaryMask& mosaic, const TileWindow& w) {
  detail::check_window(mosaic.width(), mosaic.height(), w);
  return BinaryMask(Grid<bool>(mosaic.bits().block(w.row0, w.col0, w.patch, w.patch)));
}

inline RgbImage extract_tile(const RgbImage& mosaic, const TileWindow& w) {
  detail::check_window(mosaic.width(), mosaic.height(), w);
  RgbImage tile(w.patch, w.patch);
  tile.interleaved() = mosaic.interleaved().block(w.row0, 3 * w.col0, w.patch, 3 * w.patch);
  return tile;
}

enum class MergeRule { Max, Mean, First };

MergeRule parse_merge_rule(std::string_view text);
std::string_view to_string(MergeRule rule);

/// Single-writer accumulator for tile outputs. Tile nodata cells do not
/// contribute; mosaic cells no tile covers come out as nodata.
template <typename Scalar>
class Stitcher {
 public:
  Stitcher(Index mosaic_width, Index mosaic_height, MergeRule rule,
           Scalar nodata = Scalar(kDefaultNodata), std::optional<GeoTransform> geo = std::nullopt)
      : rule_(rule),
        nodata_(nodata),
        geo_(geo),
        acc_(Grid<Scalar>::Zero(mosaic_height, mosaic_width)),
        count_(Grid<std::int32_t>::Zero(mosaic_height, mosaic_width)) {}

  void add(const TileWindow& w, const Raster<Scalar>& tile) {
    detail::check_window(acc_.cols(), acc_.rows(), w);
    if (tile.width() != w.patch || tile.height() != w.patch) {
      throw ShapeError("stitch: tile is " + std::to_string(tile.width()) + "x" +
                       std::to_string(tile.height()) + ", window expects " + std::to_string(w.patch));
    }
    if (patch_ == 0) {
      patch_ = w.patch;
      if (!geo_) {
        const GeoTransform& g = tile.geo();
        geo_ = GeoTransform{g.origin_x - static_cast<double>(w.col0) * g.cellsize,
                            g.origin_y - static_cast<double>(acc_.rows() - w.row0 - w.patch) * g.cellsize,
                            g.cellsize};
      }
    } else if (w.patch != patch_) {
      throw ShapeError("stitch: inconsistent tile sizes");
    }
    for (Index r = 0; r < w.patch; ++r) {
      for (Index c = 0; c < w.patch; ++c) {
        const Scalar v = tile(r, c);
        if (v == tile.nodata()) continue;
        Scalar& a = acc_(w.row0 + r, w.col0 + c);
        std::int32_t& n = count_(w.row0 + r, w.col0 + c);
        ++n;
        if (n == 1) {
          a = v;
          continue;
        }
        switch (rule_) {
          case MergeRule::Max: a = std::max(a, v); break;
          case MergeRule::Mean: a += (v - a) / static_cast<Scalar>(n); break;
          case MergeRule::First: break;
        }
      }
    }
  }

  Raster<Scalar> finish() const {
    Grid<Scalar> out = (count_ > 0).select(acc_, nodata_);
    return Raster<Scalar>(std::move(out), nodata_, geo_.value_or(GeoTransform{}));
  }

 private:
  MergeRule rule_;
  Scalar nodata_;
  std::optional<GeoTransform> geo_;
  Index patch_ = 0;
  Grid<Scalar> acc_;
  Grid<std::int32_t> count_;
};

/// Merges tiles into a mosaic. Without an explicit geotransform the mosaic's
/// is derived from the first tile.
template <typename Scalar>
Raster<Scalar> stitch(const std::vector<std::pair<TileWindow, Raster<Scalar>>>& tiles,
                      MergeRule rule, Index mosaic_width, Index mosaic_height,
                      std::optional<GeoTransform> geo = std::nullopt) {
  const Scalar nodata = tiles.empty() ? Scalar(kDefaultNodata) : tiles.front().second.nodata();
  Stitcher<Scalar> stitcher(mosaic_width, mosaic_height, rule, nodata, geo);
  for (const auto& [window, tile] : tiles) stitcher.add(window, tile);
  return stitcher.finish();
}

/// Sidecar {"row0":int,"col0":int,"patch":int}.
std::string window_to_json(const TileWindow& window);
TileWindow window_from_json(const std::string& text);
void write_window_json(const TileWindow& window, const std::filesystem::path& path);
TileWindow read_window_json(const std::filesystem::path& path);

}  // namespace sinksam
