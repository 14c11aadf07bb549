#pragma once

// Pixel and object-level evaluation of predicted masks against ground truth,
// plus the BCE + Dice training loss.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sinksam/labeling.hpp"
#include "sinksam/raster.hpp"
#include "sinksam/segmenter.hpp"

namespace sinksam {

struct PixelConfusion {
  std::int64_t tp = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  std::int64_t total() const noexcept { return tp + tn + fp + fn; }
  PixelConfusion& operator+=(const PixelConfusion& o) noexcept {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const PixelConfusion&, const PixelConfusion&) = default;
};

/// Counts over pixels not set in `ignore` (when given).
PixelConfusion pixel_confusion(const BinaryMask& pred, const BinaryMask& gt,
                               const BinaryMask* ignore = nullptr);

/// Accuracy, precision, recall, F1 and IoU from pixel counts.
///
/// Degenerate cases: with both masks empty (tp = fp = fn = 0) precision,
/// recall, F1 and IoU are 1. Precision is 0 when nothing was predicted but
/// ground truth exists; recall is 0 when ground truth is empty but something
/// was predicted. Accuracy of zero evaluated pixels is 1.
struct PixelMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double iou = 0.0;
};

PixelMetrics metrics_from_confusion(const PixelConfusion& c);

struct MatchPair {
  int pred_id = 0;
  int gt_id = 0;
  double iou = 0.0;
};

struct ObjectMatch {
  Index tp = 0;
  Index fp = 0;
  Index fn = 0;
  std::vector<MatchPair> pairs;
};

/// Every overlapping (pred, gt) pair with its mask IoU, sorted by descending
/// IoU, then pred id, then gt id.
std::vector<MatchPair> overlapping_pairs(const std::vector<DepressionComponent>& pred,
                                         const std::vector<DepressionComponent>& gt);

/// Greedy one-to-one matching in descending IoU over pairs with IoU >= threshold.
ObjectMatch object_match(const std::vector<DepressionComponent>& pred,
                         const std::vector<DepressionComponent>& gt, double iou_threshold);

struct DetectionRow {
  double iou_threshold = 0.0;
  Index tp = 0;
  Index fp = 0;
  Index fn = 0;
  friend bool operator==(const DetectionRow&, const DetectionRow&) = default;
};

std::vector<DetectionRow> detection_curve(const std::vector<DepressionComponent>& pred,
                                          const std::vector<DepressionComponent>& gt,
                                          const std::vector<double>& thresholds);

/// 0.1, 0.2, ..., 0.9.
std::vector<double> default_iou_thresholds();

struct MetricsReport {
  PixelMetrics metrics;
  PixelConfusion pixel_confusion;
  std::vector<DetectionRow> detection;
};

MetricsReport evaluate(const BinaryMask& pred, const BinaryMask& gt,
                       const std::vector<double>& thresholds, const BinaryMask* ignore = nullptr);

std::string report_to_json(const MetricsReport& report);

/// Results-table style row: run,f1,iou,precision,recall,accuracy.
std::string report_csv_header();
std::string report_csv_row(const std::string& run, const MetricsReport& report);

// --- loss --------------------------------------------------------------------

inline constexpr double kBceEps = 1e-7;
inline constexpr double kDiceSmooth = 1.0;

struct LossValue {
  double bce = 0.0;
  double dice = 0.0;
  double total = 0.0;  ///< bce + dice
};

namespace detail {
template <typename Scalar>
void check_loss_shapes(const BasicProbabilityMask<Scalar>& probs, const BinaryMask& gt) {
  if (probs.width() != gt.width() || probs.height() != gt.height()) {
    throw ShapeError("loss: probability and ground-truth masks differ in size");
  }
}
}  // namespace detail

/// Mean binary cross-entropy with probabilities clamped to [eps, 1 - eps].
template <typename Scalar>
double bce_loss(const BasicProbabilityMask<Scalar>& probs, const BinaryMask& gt, double eps = kBceEps) {
  detail::check_loss_shapes(probs, gt);
  if (gt.size() == 0) return 0.0;
  const Grid<double> p = probs.probs().template cast<double>().max(eps).min(1.0 - eps);
  const Grid<double> y = gt.bits().cast<double>();
  const double sum = -(y * p.log() + (1.0 - y) * (1.0 - p).log()).sum();
  return sum / static_cast<double>(gt.size());
}

/// 1 - (2 sum(p y) + s) / (sum(p) + sum(y) + s).
template <typename Scalar>
double dice_loss(const BasicProbabilityMask<Scalar>& probs, const BinaryMask& gt,
                 double smooth = kDiceSmooth) {
  detail::check_loss_shapes(probs, gt);
  const Grid<double> p = probs.probs().template cast<double>();
  const Grid<double> y = gt.bits().cast<double>();
  return 1.0 - (2.0 * (p * y).sum() + smooth) / (p.sum() + y.sum() + smooth);
}

template <typename Scalar>
LossValue combined_loss(const BasicProbabilityMask<Scalar>& probs, const BinaryMask& gt) {
  LossValue v;
  v.bce = bce_loss(probs, gt);
  v.dice = dice_loss(probs, gt);
  v.total = v.bce + v.dice;
  return v;
}

}  // namespace sinksam
