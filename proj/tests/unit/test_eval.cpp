#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "sinksam/eval.hpp"

using namespace sinksam;

namespace {

BinaryMask block(Index rows, Index cols, Index r0, Index c0, Index h, Index w) {
  BinaryMask m(rows, cols);
  m.bits().block(r0, c0, h, w).setConstant(true);
  return m;
}

}  // namespace

TEST_CASE("shifted blocks by hand") {
  // 4x4 grid; prediction covers columns 0-1 of rows 0-1, truth columns 1-2
  const BinaryMask pred = block(4, 4, 0, 0, 2, 2);
  const BinaryMask gt = block(4, 4, 0, 1, 2, 2);
  const PixelConfusion c = pixel_confusion(pred, gt);
  CHECK(c == PixelConfusion{2, 10, 2, 2});
  const PixelMetrics m = metrics_from_confusion(c);
  CHECK(m.precision == 0.5);
  CHECK(m.recall == 0.5);
  CHECK(m.f1 == 0.5);
  CHECK(m.iou == 1.0 / 3.0);
  CHECK(m.accuracy == 0.75);
}

TEST_CASE("degenerate confusion conventions") {
  const PixelMetrics empty = metrics_from_confusion({0, 16, 0, 0});
  CHECK(empty.precision == 1.0);
  CHECK(empty.recall == 1.0);
  CHECK(empty.f1 == 1.0);
  CHECK(empty.iou == 1.0);
  CHECK(empty.accuracy == 1.0);

  const PixelMetrics missed = metrics_from_confusion({0, 10, 0, 6});
  CHECK(missed.precision == 0.0);
  CHECK(missed.recall == 0.0);
  CHECK(missed.f1 == 0.0);
  CHECK(missed.iou == 0.0);

  const PixelMetrics spurious = metrics_from_confusion({0, 10, 6, 0});
  CHECK(spurious.precision == 0.0);
  CHECK(spurious.recall == 0.0);
  CHECK(spurious.iou == 0.0);

  CHECK(metrics_from_confusion({}).accuracy == 1.0);
}

TEST_CASE("ignore mask and shape checks") {
  const BinaryMask pred = block(4, 4, 0, 0, 2, 2);
  const BinaryMask gt = block(4, 4, 0, 1, 2, 2);
  const BinaryMask ignore = block(4, 4, 0, 0, 4, 1);  // first column
  const PixelConfusion c = pixel_confusion(pred, gt, &ignore);
  CHECK(c == PixelConfusion{2, 8, 0, 2});
  CHECK(c.total() == 12);
  CHECK_THROWS_AS(pixel_confusion(pred, BinaryMask(3, 4)), ShapeError);
  const BinaryMask small(2, 2);
  CHECK_THROWS_AS(pixel_confusion(pred, gt, &small), ShapeError);
}

TEST_CASE("swapping prediction and truth swaps precision and recall") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 30; ++k) {
    const BinaryMask a = oracle::random_blobs(rng, 12, 12, 0.3);
    const BinaryMask b = oracle::random_blobs(rng, 12, 12, 0.3);
    const PixelMetrics ab = metrics_from_confusion(pixel_confusion(a, b));
    const PixelMetrics ba = metrics_from_confusion(pixel_confusion(b, a));
    CHECK(ab.precision == ba.recall);
    CHECK(ab.recall == ba.precision);
    CHECK(ab.iou == ba.iou);
    CHECK(ab.f1 == doctest::Approx(ba.f1).epsilon(1e-15));
  }
}

TEST_CASE("F1 and IoU identity") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::int64_t> count(0, 5000);
  for (int k = 0; k < 1000; ++k) {
    const PixelConfusion c{count(rng), count(rng), count(rng), count(rng)};
    const PixelMetrics m = metrics_from_confusion(c);
    CHECK(std::abs(m.f1 - 2.0 * m.iou / (1.0 + m.iou)) <= 1e-12);
    CHECK(m.accuracy >= 0.0);
    CHECK(m.accuracy <= 1.0);
  }
}

TEST_CASE("object matching by hand") {
  // prediction block shifted by two columns: IoU = 8 / 24
  const auto pred = label_components(block(8, 8, 0, 2, 4, 4));
  const auto gt = label_components(block(8, 8, 0, 0, 4, 4));
  const auto pairs = overlapping_pairs(pred, gt);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].iou == 8.0 / 24.0);

  const ObjectMatch at = object_match(pred, gt, 8.0 / 24.0);
  CHECK(at.tp == 1);
  CHECK(at.fp == 0);
  CHECK(at.fn == 0);
  const ObjectMatch above = object_match(pred, gt, std::nextafter(8.0 / 24.0, 1.0));
  CHECK(above.tp == 0);
  CHECK(above.fp == 1);
  CHECK(above.fn == 1);

  CHECK_THROWS_AS(object_match(pred, gt, 0.0), InputError);
  CHECK_THROWS_AS(object_match(pred, gt, 1.0), InputError);

  const ObjectMatch none = object_match({}, gt, 0.5);
  CHECK(none.tp == 0);
  CHECK(none.fn == 1);
}

TEST_CASE("one prediction cannot match two truths") {
  // one wide prediction over two truth blocks; each truth has IoU 0.5
  BinaryMask gt(4, 8);
  gt.bits().block(0, 0, 4, 4).setConstant(true);
  gt.bits().block(0, 5, 4, 3).setConstant(true);
  const auto pred = label_components(block(4, 8, 0, 0, 4, 8));
  const auto truths = label_components(gt);
  REQUIRE(truths.size() == 2);
  const ObjectMatch m = object_match(pred, truths, 0.3);
  CHECK(m.tp == 1);
  CHECK(m.fp == 0);
  CHECK(m.fn == 1);
  REQUIRE(m.pairs.size() == 1);
  CHECK(m.pairs[0].gt_id == 1);  // 16/32 beats 12/32
}

TEST_CASE("greedy matching agrees with exhaustive search") {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 60; ++trial) {
    const auto pred = label_components(oracle::random_rectangles(rng, 24, 24, 5, 8));
    const auto gt = label_components(oracle::random_rectangles(rng, 24, 24, 5, 8));
    if (pred.size() > 8 || gt.size() > 8) continue;
    for (double t : default_iou_thresholds()) {
      const ObjectMatch m = object_match(pred, gt, t);
      const Index best = oracle::optimal_match_count(pred, gt, t);
      CHECK(m.tp + m.fp == static_cast<Index>(pred.size()));
      CHECK(m.tp + m.fn == static_cast<Index>(gt.size()));
      CHECK(m.tp <= best);
      // IoU above one half admits at most one partner per object
      if (t > 0.5) CHECK(m.tp == best);
      for (const auto& p : m.pairs) {
        CHECK(p.iou >= t);
        CHECK(p.iou == doctest::Approx(oracle::set_iou(pred[p.pred_id - 1], gt[p.gt_id - 1])).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("detection curve is monotone") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const BinaryMask gt = oracle::random_rectangles(rng, 40, 40, 6, 10);
    BinaryMask pred = gt;
    for (Index i = 0; i < pred.size(); ++i)
      if (std::bernoulli_distribution(0.1)(rng)) pred[i] = !pred[i];
    const auto rows = evaluate(pred, gt, default_iou_thresholds()).detection;
    REQUIRE(rows.size() == 9);
    for (std::size_t k = 1; k < rows.size(); ++k) {
      CHECK(rows[k].tp <= rows[k - 1].tp);
      CHECK(rows[k].fp >= rows[k - 1].fp);
    }
  }
  CHECK_THROWS_AS(detection_curve({}, {}, {0.5, 0.3}), InputError);
}

TEST_CASE("report formats") {
  const BinaryMask pred = block(4, 4, 0, 0, 2, 2);
  const BinaryMask gt = block(4, 4, 0, 1, 2, 2);
  const MetricsReport r = evaluate(pred, gt, {0.3, 0.5});
  const std::string json = report_to_json(r);
  CHECK(json.find("\"f1\": 0.5") < json.find("\"iou\""));
  CHECK(json.find("\"iou\"") < json.find("\"precision\""));
  CHECK(json.find("\"detection\"") != std::string::npos);
  CHECK(report_csv_header() == "run,f1,iou,precision,recall,accuracy\n");
  CHECK(report_csv_row("a", r) == "a,0.5,0.3333333333333333,0.5,0.5,0.75\n");
  CHECK(r.detection[0] == DetectionRow{0.3, 1, 0, 0});
  CHECK(r.detection[1] == DetectionRow{0.5, 0, 1, 1});
}

TEST_CASE("losses by hand") {
  BinaryMask ones(1, 4);
  ones.bits().setConstant(true);
  CHECK(bce_loss(ProbabilityMask(1, 4, 0.25), ones) == doctest::Approx(1.3862943611198906).epsilon(1e-15));

  BinaryMask half(4, 4);
  half.bits().topRows(2).setConstant(true);
  const ProbabilityMask p(4, 4, 0.5);
  CHECK(std::abs(bce_loss(p, half) - std::log(2.0)) <= 1e-12);
  // 1 - (2*4 + 1) / (8 + 8 + 1)
  CHECK(dice_loss(p, half) == doctest::Approx(8.0 / 17.0).epsilon(1e-15));

  const LossValue v = combined_loss(p, half);
  CHECK(v.total == v.bce + v.dice);

  // clamping keeps certain mistakes finite
  CHECK(std::isfinite(bce_loss(ProbabilityMask(1, 4, 0.0), ones)));
  CHECK(bce_loss(ProbabilityMask(1, 4, 0.0), ones) == doctest::Approx(-std::log(1e-7)));

  // perfect prediction
  CHECK(dice_loss(ProbabilityMask(Grid<double>(half.bits().cast<double>())), half) == 0.0);
  CHECK(dice_loss(ProbabilityMask(4, 4, 0.0), BinaryMask(4, 4)) == 0.0);

  const BasicProbabilityMask<float> pf(4, 4, 0.5f);
  CHECK(std::abs(bce_loss(pf, half) - std::log(2.0)) <= 1e-12);

  CHECK_THROWS_AS(bce_loss(p, BinaryMask(3, 3)), ShapeError);
}
