#include "sinksam/labeling.hpp"

#include <json.hpp>

#include "sinksam/ascii_grid.hpp"
#include "sinksam/error.hpp"

namespace sinksam {

using nlohmann::json;

std::vector<DepressionComponent> filter_components(std::vector<DepressionComponent> components,
                                                   const FilterThresholds& thresholds) {
  if (thresholds.min_depth < 0.0) throw InputError("filter: min_depth must be >= 0");
  if (thresholds.min_area_px < 1) throw InputError("filter: min_area_px must be >= 1");
  std::erase_if(components, [&](const DepressionComponent& comp) {
    return comp.max_depth < thresholds.min_depth || comp.area_px < thresholds.min_area_px;
  });
  return components;
}

std::vector<PromptBox> boxes_from_components(const std::vector<DepressionComponent>& components,
                                             Index pad_px, Index patch_width, Index patch_height) {
  if (pad_px < 0) throw InputError("boxes: pad_px must be >= 0");
  std::vector<PromptBox> boxes;
  boxes.reserve(components.size());
  for (const auto& comp : components) {
    const PromptBox& b = comp.bbox;
    PromptBox padded{std::max<Index>(0, b.x0 - pad_px), std::max<Index>(0, b.y0 - pad_px),
                     std::min(patch_width, b.x1 + pad_px), std::min(patch_height, b.y1 + pad_px)};
    if (!padded.valid_for(patch_width, patch_height)) {
      throw InputError("boxes: component " + std::to_string(comp.id) + " lies outside the patch");
    }
    boxes.push_back(padded);
  }
  return boxes;
}

BoxesDocument make_boxes_document(std::string patch_id,
                                  const std::vector<DepressionComponent>& components,
                                  Index pad_px, Index patch_width, Index patch_height) {
  BoxesDocument doc;
  doc.patch_id = std::move(patch_id);
  doc.boxes = boxes_from_components(components, pad_px, patch_width, patch_height);
  for (const auto& comp : components) {
    doc.areas.push_back(comp.area_px);
    doc.max_depths.push_back(comp.max_depth);
  }
  return doc;
}

std::string boxes_to_json(const BoxesDocument& doc) {
  json boxes = json::array();
  for (const auto& b : doc.boxes) boxes.push_back({b.x0, b.y0, b.x1, b.y1});
  json j;
  j["patch_id"] = doc.patch_id;
  j["boxes"] = std::move(boxes);
  j["areas"] = doc.areas;
  j["max_depths"] = doc.max_depths;
  return j.dump() + "\n";
}

BoxesDocument boxes_from_json(const std::string& text) {
  BoxesDocument doc;
  try {
    const json j = json::parse(text);
    doc.patch_id = j.at("patch_id").get<std::string>();
    for (const auto& b : j.at("boxes")) {
      if (!b.is_array() || b.size() != 4) throw InputError("boxes json: each box needs 4 coordinates");
      doc.boxes.push_back({b[0].get<Index>(), b[1].get<Index>(), b[2].get<Index>(), b[3].get<Index>()});
    }
    // Detector-produced files may omit the depression statistics.
    if (j.contains("areas")) doc.areas = j.at("areas").get<std::vector<Index>>();
    if (j.contains("max_depths")) doc.max_depths = j.at("max_depths").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw InputError(std::string("boxes json: ") + e.what());
  }
  if ((!doc.areas.empty() && doc.areas.size() != doc.boxes.size()) ||
      (!doc.max_depths.empty() && doc.max_depths.size() != doc.boxes.size())) {
    throw InputError("boxes json: areas/max_depths length differs from boxes");
  }
  return doc;
}

void write_boxes_json(const BoxesDocument& doc, const std::filesystem::path& path) {
  detail::write_text_file(path, boxes_to_json(doc));
}

BoxesDocument read_boxes_json(const std::filesystem::path& path) {
  return boxes_from_json(detail::read_text_file(path));
}

}  // namespace sinksam
