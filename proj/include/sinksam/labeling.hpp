#pragma once

// Connected depressions, size/depth filtering and prompt boxes.

#include <algorithm>
#include <filesystem>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sinksam/fill.hpp"
#include "sinksam/raster.hpp"

namespace sinksam {

/// Axis-aligned pixel box, half-open: [x0, x1) x [y0, y1). x is the column.
struct PromptBox {
  Index x0 = 0;
  Index y0 = 0;
  Index x1 = 0;
  Index y1 = 0;

  Index width() const noexcept { return x1 - x0; }
  Index height() const noexcept { return y1 - y0; }
  bool contains(Index row, Index col) const noexcept {
    return col >= x0 && col < x1 && row >= y0 && row < y1;
  }
  /// True when the box is non-empty and lies inside a width x height patch.
  bool valid_for(Index patch_width, Index patch_height) const noexcept {
    return 0 <= x0 && x0 < x1 && x1 <= patch_width && 0 <= y0 && y0 < y1 && y1 <= patch_height;
  }

  friend bool operator==(const PromptBox&, const PromptBox&) = default;
};

struct Pixel {
  Index row = 0;
  Index col = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Maximal 8-connected set of positive-depth cells.
struct DepressionComponent {
  int id = 0;                 ///< 1-based, raster scan order of the first pixel
  std::vector<Pixel> pixels;  ///< BFS order
  Index area_px = 0;
  double max_depth = 0.0;
  PromptBox bbox;             ///< tight bounds
};

/// Defaults: depth < 2 (non-metric) or area < 50 px removes a depression.
struct FilterThresholds {
  double min_depth = 2.0;
  Index min_area_px = 50;
};

namespace detail {

/// Labels 8-connected components of `inside`, scanning row-major. `depth_at`
/// supplies the per-pixel statistic for max_depth.
template <typename DepthAt>
std::vector<DepressionComponent> label_cells(const Grid<bool>& inside, DepthAt&& depth_at) {
  const Index rows = inside.rows();
  const Index cols = inside.cols();
  std::vector<int> label(static_cast<std::size_t>(inside.size()), 0);
  std::vector<DepressionComponent> out;
  std::vector<Index> frontier;

  for (Index r0 = 0; r0 < rows; ++r0) {
    for (Index c0 = 0; c0 < cols; ++c0) {
      const Index seed = r0 * cols + c0;
      if (!inside(r0, c0) || label[seed] != 0) continue;

      DepressionComponent comp;
      comp.id = static_cast<int>(out.size()) + 1;
      comp.max_depth = -std::numeric_limits<double>::infinity();
      comp.bbox = {c0, r0, c0 + 1, r0 + 1};
      label[seed] = comp.id;
      frontier.assign(1, seed);
      for (std::size_t head = 0; head < frontier.size(); ++head) {
        const Index cell = frontier[head];
        const Index r = cell / cols;
        const Index c = cell % cols;
        comp.pixels.push_back({r, c});
        comp.max_depth = std::max(comp.max_depth, static_cast<double>(depth_at(r, c)));
        comp.bbox.x0 = std::min(comp.bbox.x0, c);
        comp.bbox.y0 = std::min(comp.bbox.y0, r);
        comp.bbox.x1 = std::max(comp.bbox.x1, c + 1);
        comp.bbox.y1 = std::max(comp.bbox.y1, r + 1);
        for (int k = 0; k < 8; ++k) {
          const Index nr = r + kD8Row[k];
          const Index nc = c + kD8Col[k];
          if (nr < 0 || nc < 0 || nr >= rows || nc >= cols) continue;
          const Index n = nr * cols + nc;
          if (!inside(nr, nc) || label[n] != 0) continue;
          label[n] = comp.id;
          frontier.push_back(n);
        }
      }
      comp.area_px = static_cast<Index>(comp.pixels.size());
      out.push_back(std::move(comp));
    }
  }
  return out;
}

}  // namespace detail

/// Components of cells with depth > 0 (nodata excluded), ids from 1 in scan order.
template <typename Scalar>
std::vector<DepressionComponent> label_components(const Raster<Scalar>& depth) {
  const Grid<bool> inside = positive_mask(depth).bits();
  return detail::label_cells(inside, [&](Index r, Index c) { return depth(r, c); });
}

/// Components of set mask cells; max_depth is 1 for every component.
inline std::vector<DepressionComponent> label_components(const BinaryMask& mask) {
  return detail::label_cells(mask.bits(), [](Index, Index) { return 1.0; });
}

/// Drops a component iff max_depth < min_depth or area_px < min_area_px.
std::vector<DepressionComponent> filter_components(std::vector<DepressionComponent> components,
                                                   const FilterThresholds& thresholds);

/// Tight boxes grown by pad_px on every side and clamped to the patch.
std::vector<PromptBox> boxes_from_components(const std::vector<DepressionComponent>& components,
                                             Index pad_px, Index patch_width, Index patch_height);

/// Zeroes every positive cell of `depth` not covered by `keep`.
template <typename Scalar>
Raster<Scalar> retain_components(const Raster<Scalar>& depth,
                                 const std::vector<DepressionComponent>& keep) {
  Raster<Scalar> out(depth.height(), depth.width(), Scalar(0), depth.nodata(), depth.geo());
  out.values() = depth.valid_mask().select(Grid<Scalar>::Zero(depth.height(), depth.width()),
                                           depth.nodata());
  for (const auto& comp : keep) {
    for (const auto& p : comp.pixels) out(p.row, p.col) = depth(p.row, p.col);
  }
  return out;
}

/// Prompt file contents: one patch's boxes and their source statistics.
struct BoxesDocument {
  std::string patch_id;
  std::vector<PromptBox> boxes;
  std::vector<Index> areas;
  std::vector<double> max_depths;

  friend bool operator==(const BoxesDocument&, const BoxesDocument&) = default;
};

BoxesDocument make_boxes_document(std::string patch_id,
                                  const std::vector<DepressionComponent>& components,
                                  Index pad_px, Index patch_width, Index patch_height);

/// {"patch_id": str, "boxes": [[x0,y0,x1,y1],...], "areas": [int], "max_depths": [real]}
std::string boxes_to_json(const BoxesDocument& doc);
BoxesDocument boxes_from_json(const std::string& text);

void write_boxes_json(const BoxesDocument& doc, const std::filesystem::path& path);
BoxesDocument read_boxes_json(const std::filesystem::path& path);

}  // namespace sinksam
