#include "sinksam/eval.hpp"

#include <map>

#include <json.hpp>

#include "sinksam/ascii_grid.hpp"

namespace sinksam {

PixelConfusion pixel_confusion(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask* ignore) {
  if (!pred.same_shape(gt)) throw ShapeError("pixel_confusion: prediction and ground truth differ in size");
  if (ignore && !ignore->same_shape(gt)) throw ShapeError("pixel_confusion: ignore mask differs in size");
  const auto& p = pred.bits();
  const auto& g = gt.bits();
  Grid<bool> keep = Grid<bool>::Constant(g.rows(), g.cols(), true);
  if (ignore) keep = !ignore->bits();
  PixelConfusion c;
  c.tp = (keep && p && g).count();
  c.fp = (keep && p && !g).count();
  c.fn = (keep && !p && g).count();
  c.tn = (keep && !p && !g).count();
  return c;
}

PixelMetrics metrics_from_confusion(const PixelConfusion& c) {
  const auto tp = static_cast<double>(c.tp);
  const auto fp = static_cast<double>(c.fp);
  const auto fn = static_cast<double>(c.fn);
  PixelMetrics m;
  m.accuracy = c.total() == 0 ? 1.0 : static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  if (c.tp + c.fp + c.fn == 0) {
    m.precision = m.recall = m.f1 = m.iou = 1.0;
    return m;
  }
  m.precision = c.tp + c.fp == 0 ? 0.0 : tp / (tp + fp);
  m.recall = c.tp + c.fn == 0 ? 0.0 : tp / (tp + fn);
  m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  m.iou = tp / (tp + fp + fn);
  return m;
}

std::vector<MatchPair> overlapping_pairs(const std::vector<DepressionComponent>& pred,
                                         const std::vector<DepressionComponent>& gt) {
  Index rows = 0;
  Index cols = 0;
  for (const auto* set : {&pred, &gt}) {
    for (const auto& comp : *set) {
      rows = std::max(rows, comp.bbox.y1);
      cols = std::max(cols, comp.bbox.x1);
    }
  }
  // Index into gt + 1 per pixel; 0 where no gt component lies.
  Grid<std::int32_t> gt_at = Grid<std::int32_t>::Zero(rows, cols);
  for (std::size_t g = 0; g < gt.size(); ++g) {
    for (const auto& px : gt[g].pixels) gt_at(px.row, px.col) = static_cast<std::int32_t>(g + 1);
  }
  std::vector<MatchPair> pairs;
  for (const auto& p : pred) {
    std::map<std::size_t, Index> inter;
    for (const auto& px : p.pixels) {
      if (const auto g = gt_at(px.row, px.col); g > 0) ++inter[static_cast<std::size_t>(g - 1)];
    }
    for (const auto& [g, n] : inter) {
      const double uni = static_cast<double>(p.area_px + gt[g].area_px - n);
      pairs.push_back({p.id, gt[g].id, static_cast<double>(n) / uni});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const MatchPair& a, const MatchPair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.pred_id != b.pred_id) return a.pred_id < b.pred_id;
    return a.gt_id < b.gt_id;
  });
  return pairs;
}

namespace {

ObjectMatch greedy_match(const std::vector<MatchPair>& sorted_pairs, std::size_t n_pred,
                         std::size_t n_gt, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InputError("object_match: IoU threshold must lie in (0, 1)");
  }
  std::map<int, bool> pred_used;
  std::map<int, bool> gt_used;
  ObjectMatch out;
  for (const auto& pair : sorted_pairs) {
    if (pair.iou < threshold) break;
    if (pred_used[pair.pred_id] || gt_used[pair.gt_id]) continue;
    pred_used[pair.pred_id] = gt_used[pair.gt_id] = true;
    out.pairs.push_back(pair);
  }
  out.tp = static_cast<Index>(out.pairs.size());
  out.fp = static_cast<Index>(n_pred) - out.tp;
  out.fn = static_cast<Index>(n_gt) - out.tp;
  return out;
}

}  // namespace

ObjectMatch object_match(const std::vector<DepressionComponent>& pred,
                         const std::vector<DepressionComponent>& gt, double iou_threshold) {
  return greedy_match(overlapping_pairs(pred, gt), pred.size(), gt.size(), iou_threshold);
}

std::vector<DetectionRow> detection_curve(const std::vector<DepressionComponent>& pred,
                                          const std::vector<DepressionComponent>& gt,
                                          const std::vector<double>& thresholds) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw InputError("detection_curve: thresholds must be sorted ascending");
  }
  const auto pairs = overlapping_pairs(pred, gt);
  std::vector<DetectionRow> rows;
  for (double t : thresholds) {
    const auto m = greedy_match(pairs, pred.size(), gt.size(), t);
    rows.push_back({t, m.tp, m.fp, m.fn});
  }
  return rows;
}

std::vector<double> default_iou_thresholds() {
  std::vector<double> t;
  for (int k = 1; k <= 9; ++k) t.push_back(k / 10.0);
  return t;
}

MetricsReport evaluate(const BinaryMask& pred, const BinaryMask& gt,
                       const std::vector<double>& thresholds, const BinaryMask* ignore) {
  MetricsReport report;
  report.pixel_confusion = pixel_confusion(pred, gt, ignore);
  report.metrics = metrics_from_confusion(report.pixel_confusion);
  report.detection = detection_curve(label_components(pred), label_components(gt), thresholds);
  return report;
}

std::string report_to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["f1"] = r.metrics.f1;
  j["iou"] = r.metrics.iou;
  j["precision"] = r.metrics.precision;
  j["recall"] = r.metrics.recall;
  j["accuracy"] = r.metrics.accuracy;
  j["pixel_confusion"] = {{"tp", r.pixel_confusion.tp},
                          {"tn", r.pixel_confusion.tn},
                          {"fp", r.pixel_confusion.fp},
                          {"fn", r.pixel_confusion.fn}};
  j["detection"] = nlohmann::ordered_json::array();
  for (const auto& row : r.detection) {
    j["detection"].push_back(
        {{"iou_threshold", row.iou_threshold}, {"tp", row.tp}, {"fp", row.fp}, {"fn", row.fn}});
  }
  return j.dump(2) + "\n";
}

std::string report_csv_header() { return "run,f1,iou,precision,recall,accuracy\n"; }

std::string report_csv_row(const std::string& run, const MetricsReport& r) {
  std::string row = run;
  for (double v : {r.metrics.f1, r.metrics.iou, r.metrics.precision, r.metrics.recall, r.metrics.accuracy}) {
    row += ',' + detail::format_number(v);
  }
  return row + "\n";
}

}  // namespace sinksam
