#include "sinksam/tiling.hpp"

#include <cstdio>

#include <json.hpp>

#include "sinksam/ascii_grid.hpp"

namespace sinksam {

std::vector<Index> plan_axis(Index size, const TileSpec& spec) {
  if (spec.patch <= 0 || spec.stride <= 0 || spec.stride > spec.patch) {
    throw InputError("tile spec requires 0 < stride <= patch");
  }
  if (size < spec.patch) {
    throw InputError("mosaic side " + std::to_string(size) + " is smaller than patch " +
                     std::to_string(spec.patch));
  }
  std::vector<Index> origins;
  for (Index o = 0; o + spec.patch <= size; o += spec.stride) origins.push_back(o);
  if (origins.back() + spec.patch < size) origins.push_back(size - spec.patch);
  return origins;
}

std::vector<TileWindow> plan_tiles(Index mosaic_width, Index mosaic_height, const TileSpec& spec) {
  const auto rows = plan_axis(mosaic_height, spec);
  const auto cols = plan_axis(mosaic_width, spec);
  std::vector<TileWindow> windows;
  windows.reserve(rows.size() * cols.size());
  for (Index r : rows) {
    for (Index c : cols) windows.push_back({r, c, spec.patch});
  }
  return windows;
}

std::string tile_id(const TileWindow& window) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "r%05lld_c%05lld", static_cast<long long>(window.row0),
                static_cast<long long>(window.col0));
  return buf;
}

GeoTransform window_geo(const GeoTransform& mosaic, Index mosaic_height, const TileWindow& w) {
  return {mosaic.origin_x + static_cast<double>(w.col0) * mosaic.cellsize,
          mosaic.origin_y + static_cast<double>(mosaic_height - w.row0 - w.patch) * mosaic.cellsize,
          mosaic.cellsize};
}

MergeRule parse_merge_rule(std::string_view text) {
  if (detail::iequals(text, "max")) return MergeRule::Max;
  if (detail::iequals(text, "mean")) return MergeRule::Mean;
  if (detail::iequals(text, "first")) return MergeRule::First;
  throw InputError("unknown merge rule '" + std::string(text) + "' (expected max, mean or first)");
}

std::string_view to_string(MergeRule rule) {
  switch (rule) {
    case MergeRule::Max: return "max";
    case MergeRule::Mean: return "mean";
    case MergeRule::First: return "first";
  }
  return "?";
}

std::string window_to_json(const TileWindow& w) {
  nlohmann::json j;
  j["row0"] = w.row0;
  j["col0"] = w.col0;
  j["patch"] = w.patch;
  return j.dump() + "\n";
}

TileWindow window_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    return {j.at("row0").get<Index>(), j.at("col0").get<Index>(), j.at("patch").get<Index>()};
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("window json: ") + e.what());
  }
}

void write_window_json(const TileWindow& window, const std::filesystem::path& path) {
  detail::write_text_file(path, window_to_json(window));
}

TileWindow read_window_json(const std::filesystem::path& path) {
  return window_from_json(detail::read_text_file(path));
}

}  // namespace sinksam
