#pragma once

// Prompt-based segmentation backends and per-patch mask fusion.

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <condition_variable>
#include <span>
#include <string>
#include <vector>

#include "sinksam/error.hpp"
#include "sinksam/image.hpp"
#include "sinksam/labeling.hpp"
#include "sinksam/raster.hpp"

namespace sinksam {

/// Patch-sized foreground probabilities, every value in [0, 1].
template <typename Scalar>
class BasicProbabilityMask {
 public:
  BasicProbabilityMask() = default;
  BasicProbabilityMask(Index height, Index width, Scalar fill = Scalar(0))
      : probs_(Grid<Scalar>::Constant(height, width, fill)) {
    check();
  }
  explicit BasicProbabilityMask(Grid<Scalar> probs) : probs_(std::move(probs)) { check(); }

  Index width() const noexcept { return probs_.cols(); }
  Index height() const noexcept { return probs_.rows(); }
  const Grid<Scalar>& probs() const noexcept { return probs_; }
  Scalar operator()(Index r, Index c) const { return probs_(r, c); }

 private:
  void check() const {
    // Written so that NaN fails too.
    if (probs_.size() > 0 && !((probs_ >= Scalar(0)) && (probs_ <= Scalar(1))).all()) {
      throw InputError("probability mask value outside [0, 1]");
    }
  }

  Grid<Scalar> probs_;
};

using ProbabilityMask = BasicProbabilityMask<double>;

/// Failure talking to, or interpreting the answer of, a segmentation backend.
class BackendError : public Error {
 public:
  enum class Kind { Unreachable, Timeout, HttpStatus, Schema, Dimension, Range, MissingFile };

  BackendError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(BackendError::Kind kind);

/// Raw backend answer; validated by segment_patch.
struct BackendReply {
  std::vector<Grid<double>> masks;
  std::vector<double> scores;
};

class SegmenterBackend {
 public:
  virtual ~SegmenterBackend() = default;
  /// One patch-sized mask and one score per box, in box order.
  virtual BackendReply segment(const std::string& patch_id, const RgbImage& patch,
                               std::span<const PromptBox> boxes) = 0;
};

struct SegmentationOutcome {
  std::vector<ProbabilityMask> masks;
  std::vector<double> scores;
  ProbabilityMask fused_probability;  ///< per-pixel max over masks (zero without boxes)
  BinaryMask fused;                   ///< fused_probability > threshold
};

/// Per-pixel maximum over `masks`; all-zero for an empty list.
ProbabilityMask fuse_max(std::span<const ProbabilityMask> masks, Index height, Index width);

/// Queries `backend` for every box of a patch, validates the reply and fuses
/// the masks by taking the highest foreground probability per pixel.
SegmentationOutcome segment_patch(SegmenterBackend& backend, const std::string& patch_id,
                                  const RgbImage& patch, std::span<const PromptBox> boxes,
                                  double binarize_threshold = 0.5);

/// Answers each box with the positive-depth cells inside it (1.0), else 0.0.
class DepressionEchoBackend final : public SegmenterBackend {
 public:
  explicit DepressionEchoBackend(RasterD depth_patch);
  BackendReply segment(const std::string& patch_id, const RgbImage& patch,
                       std::span<const PromptBox> boxes) override;

 private:
  RasterD depth_;
};

std::unique_ptr<SegmenterBackend> depression_echo_backend(RasterD depth_patch);

/// Reads `<dir>/<patch_id>/<box_index>.pgm`, rescaled from 0..255 to [0, 1].
class ReplayBackend final : public SegmenterBackend {
 public:
  explicit ReplayBackend(std::filesystem::path directory);
  BackendReply segment(const std::string& patch_id, const RgbImage& patch,
                       std::span<const PromptBox> boxes) override;

 private:
  std::filesystem::path dir_;
};

std::unique_ptr<SegmenterBackend> replay_backend(std::filesystem::path directory);

// Wire protocol (POST <endpoint>/segment):
//   request  {"image_ppm_b64": str, "boxes": [[x0,y0,x1,y1],...]}
//   response {"masks_pgm_b64": [str,...], "scores": [real,...]}
// One P5 maxval-255 patch-sized mask per box. Errors: {"error": str}.
std::string encode_segment_request(const RgbImage& patch, std::span<const PromptBox> boxes);

struct DecodedRequest {
  RgbImage image;
  std::vector<PromptBox> boxes;
};
DecodedRequest decode_segment_request(const std::string& body);

/// Parses a 200 response body. Throws BackendError(Schema) on structural
/// problems, (Dimension) for masks of the wrong size, (Range) for scores
/// outside [0, 1]. Mask count is checked by segment_patch.
BackendReply decode_segment_response(const std::string& body, Index height, Index width);

std::string encode_segment_response(std::span<const GrayImage> masks, std::span<const double> scores);

struct HttpBackendOptions {
  std::string endpoint;          ///< e.g. "http://127.0.0.1:8080" or with a path prefix
  double timeout_s = 30.0;
  int retries = 2;               ///< extra attempts after transport errors or 5xx
  int max_inflight = 4;
};

/// Client for the wire protocol above. Thread-safe; at most max_inflight
/// requests are outstanding at a time.
class HttpBackend final : public SegmenterBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);
  BackendReply segment(const std::string& patch_id, const RgbImage& patch,
                       std::span<const PromptBox> boxes) override;

 private:
  HttpBackendOptions options_;
  std::string base_;    // scheme://host:port
  std::string prefix_;  // path prefix, no trailing slash
  std::mutex mutex_;
  std::condition_variable slot_freed_;
  int inflight_ = 0;
};

std::unique_ptr<SegmenterBackend> http_backend(std::string endpoint, double timeout_s,
                                               int retries = 2, int max_inflight = 4);

}  // namespace sinksam
