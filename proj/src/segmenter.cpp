#include "sinksam/segmenter.hpp"

#include <cmath>

#include <json.hpp>

#include "sinksam/ascii_grid.hpp"
#include "sinksam/base64.hpp"

namespace sinksam {

using nlohmann::json;

std::string_view to_string(BackendError::Kind kind) {
  switch (kind) {
    case BackendError::Kind::Unreachable: return "unreachable";
    case BackendError::Kind::Timeout: return "timeout";
    case BackendError::Kind::HttpStatus: return "http-status";
    case BackendError::Kind::Schema: return "schema";
    case BackendError::Kind::Dimension: return "dimension";
    case BackendError::Kind::Range: return "range";
    case BackendError::Kind::MissingFile: return "missing-file";
  }
  return "?";
}

ProbabilityMask fuse_max(std::span<const ProbabilityMask> masks, Index height, Index width) {
  Grid<double> fused = Grid<double>::Zero(height, width);
  for (const auto& m : masks) {
    if (m.height() != height || m.width() != width) throw ShapeError("fuse: mask size differs from patch");
    fused = fused.max(m.probs());
  }
  return ProbabilityMask(std::move(fused));
}

SegmentationOutcome segment_patch(SegmenterBackend& backend, const std::string& patch_id,
                                  const RgbImage& patch, std::span<const PromptBox> boxes,
                                  double binarize_threshold) {
  const Index h = patch.height();
  const Index w = patch.width();
  for (const auto& b : boxes) {
    if (!b.valid_for(w, h)) {
      throw InputError("patch " + patch_id + ": box [" + std::to_string(b.x0) + "," +
                       std::to_string(b.y0) + "," + std::to_string(b.x1) + "," +
                       std::to_string(b.y1) + "] is not inside the patch");
    }
  }

  SegmentationOutcome out;
  if (!boxes.empty()) {
    BackendReply reply = backend.segment(patch_id, patch, boxes);
    if (reply.masks.size() != boxes.size() || reply.scores.size() != boxes.size()) {
      throw BackendError(BackendError::Kind::Schema,
                         "patch " + patch_id + ": backend returned " +
                             std::to_string(reply.masks.size()) + " masks and " +
                             std::to_string(reply.scores.size()) + " scores for " +
                             std::to_string(boxes.size()) + " boxes");
    }
    for (std::size_t k = 0; k < reply.masks.size(); ++k) {
      auto& m = reply.masks[k];
      if (m.rows() != h || m.cols() != w) {
        throw BackendError(BackendError::Kind::Dimension,
                           "patch " + patch_id + ": mask " + std::to_string(k) + " is " +
                               std::to_string(m.cols()) + "x" + std::to_string(m.rows()) +
                               ", patch is " + std::to_string(w) + "x" + std::to_string(h));
      }
      if (!((m >= 0.0) && (m <= 1.0)).all()) {
        throw BackendError(BackendError::Kind::Range,
                           "patch " + patch_id + ": mask " + std::to_string(k) + " has probabilities outside [0, 1]");
      }
      const double s = reply.scores[k];
      if (!(s >= 0.0 && s <= 1.0)) {
        throw BackendError(BackendError::Kind::Range,
                           "patch " + patch_id + ": score " + std::to_string(k) + " outside [0, 1]");
      }
      out.masks.emplace_back(std::move(m));
    }
    out.scores = std::move(reply.scores);
  }
  out.fused_probability = fuse_max(out.masks, h, w);
  out.fused = BinaryMask(Grid<bool>(out.fused_probability.probs() > binarize_threshold));
  return out;
}

// --- depression echo ------------------------------------------------------

DepressionEchoBackend::DepressionEchoBackend(RasterD depth_patch) : depth_(std::move(depth_patch)) {}

BackendReply DepressionEchoBackend::segment(const std::string& patch_id, const RgbImage& patch,
                                            std::span<const PromptBox> boxes) {
  if (patch.width() != depth_.width() || patch.height() != depth_.height()) {
    throw ShapeError("echo backend: depth patch is not aligned with RGB patch " + patch_id);
  }
  const Grid<double> positive = positive_mask(depth_).bits().cast<double>();
  BackendReply reply;
  for (const auto& b : boxes) {
    Grid<double> m = Grid<double>::Zero(depth_.height(), depth_.width());
    m.block(b.y0, b.x0, b.height(), b.width()) = positive.block(b.y0, b.x0, b.height(), b.width());
    reply.scores.push_back(m.maxCoeff());
    reply.masks.push_back(std::move(m));
  }
  return reply;
}

std::unique_ptr<SegmenterBackend> depression_echo_backend(RasterD depth_patch) {
  return std::make_unique<DepressionEchoBackend>(std::move(depth_patch));
}

// --- replay -----------------------------------------------------------------

ReplayBackend::ReplayBackend(std::filesystem::path directory) : dir_(std::move(directory)) {
  if (!std::filesystem::is_directory(dir_)) {
    throw InputError("replay backend: '" + dir_.string() + "' is not a directory");
  }
}

BackendReply ReplayBackend::segment(const std::string& patch_id, const RgbImage&,
                                    std::span<const PromptBox> boxes) {
  BackendReply reply;
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    const auto path = dir_ / patch_id / (std::to_string(k) + ".pgm");
    if (!std::filesystem::is_regular_file(path)) {
      throw BackendError(BackendError::Kind::MissingFile, "replay backend: missing " + path.string());
    }
    const GrayImage gray = read_pgm(path);
    reply.masks.push_back(gray.cast<double>() / 255.0);
    reply.scores.push_back(1.0);
  }
  return reply;
}

std::unique_ptr<SegmenterBackend> replay_backend(std::filesystem::path directory) {
  return std::make_unique<ReplayBackend>(std::move(directory));
}

// --- wire protocol --------------------------------------------------------

namespace {

json boxes_json(std::span<const PromptBox> boxes) {
  json arr = json::array();
  for (const auto& b : boxes) arr.push_back({b.x0, b.y0, b.x1, b.y1});
  return arr;
}

[[noreturn]] void schema_error(const std::string& what) {
  throw BackendError(BackendError::Kind::Schema, "segment response: " + what);
}

}  // namespace

std::string encode_segment_request(const RgbImage& patch, std::span<const PromptBox> boxes) {
  json j;
  j["image_ppm_b64"] = base64_encode(encode_ppm(patch));
  j["boxes"] = boxes_json(boxes);
  return j.dump();
}

DecodedRequest decode_segment_request(const std::string& body) {
  DecodedRequest out;
  try {
    const json j = json::parse(body);
    out.image = decode_ppm(base64_decode(j.at("image_ppm_b64").get<std::string>()));
    for (const auto& b : j.at("boxes")) {
      if (!b.is_array() || b.size() != 4) throw InputError("each box needs 4 coordinates");
      out.boxes.push_back({b[0].get<Index>(), b[1].get<Index>(), b[2].get<Index>(), b[3].get<Index>()});
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("segment request: ") + e.what());
  }
  return out;
}

BackendReply decode_segment_response(const std::string& body, Index height, Index width) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    schema_error(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) schema_error("body is not an object");
  if (!j.contains("masks_pgm_b64") || !j["masks_pgm_b64"].is_array()) schema_error("missing masks_pgm_b64 array");
  if (!j.contains("scores") || !j["scores"].is_array()) schema_error("missing scores array");

  BackendReply reply;
  const auto& masks = j["masks_pgm_b64"];
  for (std::size_t k = 0; k < masks.size(); ++k) {
    if (!masks[k].is_string()) schema_error("mask " + std::to_string(k) + " is not a string");
    GrayImage gray;
    try {
      gray = decode_pgm(base64_decode(masks[k].get<std::string>()));
    } catch (const InputError& e) {
      schema_error("mask " + std::to_string(k) + ": " + e.what());
    }
    if (gray.rows() != height || gray.cols() != width) {
      throw BackendError(BackendError::Kind::Dimension,
                         "segment response: mask " + std::to_string(k) + " is " +
                             std::to_string(gray.cols()) + "x" + std::to_string(gray.rows()) +
                             ", expected " + std::to_string(width) + "x" + std::to_string(height));
    }
    reply.masks.push_back(gray.cast<double>() / 255.0);
  }
  for (const auto& s : j["scores"]) {
    if (!s.is_number()) schema_error("score is not a number");
    const double v = s.get<double>();
    if (!(v >= 0.0 && v <= 1.0)) {
      throw BackendError(BackendError::Kind::Range,
                         "segment response: score " + std::to_string(v) + " outside [0, 1]");
    }
    reply.scores.push_back(v);
  }
  return reply;
}

std::string encode_segment_response(std::span<const GrayImage> masks, std::span<const double> scores) {
  json j;
  j["masks_pgm_b64"] = json::array();
  for (const auto& m : masks) j["masks_pgm_b64"].push_back(base64_encode(encode_pgm(m)));
  j["scores"] = std::vector<double>(scores.begin(), scores.end());
  return j.dump();
}

}  // namespace sinksam
