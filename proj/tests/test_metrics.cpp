#include <gtest/gtest.h>

#include <vector>

#include "bicon/metrics.hpp"
#include "support/oracles.hpp"

namespace bicon {
namespace {

Map as_map(const BinaryMask& m) {
  Map out(m.height(), m.width());
  for (std::size_t i = 0; i < m.size(); ++i) out.values()[i] = m.values()[i];
  return out;
}

template <typename P>
P transpose(const P& p) {
  P out(p.width(), p.height());
  for (int y = 0; y < p.height(); ++y) {
    for (int x = 0; x < p.width(); ++x) out(x, y) = p(y, x);
  }
  return out;
}

// Mix of hard and soft predictions, sometimes all-zero, over varied GTs.
Map random_prediction(Rng& rng, const SaliencyMask& gt) {
  Map p(gt.height(), gt.width());
  const int style = rng.uniform_int(0, 3);
  for (std::size_t i = 0; i < p.size(); ++i) {
    switch (style) {
      case 0: p.values()[i] = rng.uniform(); break;
      case 1: p.values()[i] = rng.uniform() < 0.5 ? 0.0 : 1.0; break;
      case 2: p.values()[i] = gt.values()[i] ? rng.uniform(0.4, 1.0) : rng.uniform(0.0, 0.6); break;
      default: p.values()[i] = rng.uniform() < 0.1 ? rng.uniform() : 0.0; break;
    }
  }
  return p;
}

SaliencyMask random_gt(Rng& rng, int h, int w) {
  switch (rng.uniform_int(0, 5)) {
    case 0: return SaliencyMask(h, w, 0);
    case 1: return SaliencyMask(h, w, 1);
    default: return oracle::random_mask(rng, h, w, rng.uniform(0.05, 0.95));
  }
}

TEST(Mae, Examples) {
  SaliencyMask gt(2, 2);
  gt(0, 0) = 1;
  EXPECT_EQ(mae(as_map(gt), gt), 0.0);
  EXPECT_DOUBLE_EQ(mae(Map(2, 2, 0.5), gt), 0.5);
  EXPECT_THROW(mae(Map(2, 3), gt), InvalidArgument);
}

TEST(FMeasure, Examples) {
  SaliencyMask gt(3, 3);
  gt(1, 1) = 1;
  gt(1, 2) = 1;
  EXPECT_EQ(f_measure_adaptive(as_map(gt), gt), 1.0);
  EXPECT_EQ(f_measure_adaptive(Map(3, 3, 0.0), gt), 0.0);
  EXPECT_EQ(f_measure_adaptive(Map(3, 3, 0.7), SaliencyMask(3, 3, 0)), 0.0);
  EXPECT_THROW(f_measure_adaptive(Map(3, 2), gt), InvalidArgument);
}

TEST(FMeasure, ThresholdClampsAtOne) {
  // Mean 0.75, so 2 * mean exceeds 1 and the clamp keeps every salient pixel.
  SaliencyMask gt(2, 2, 1);
  gt(0, 0) = 0;
  EXPECT_EQ(adaptive_threshold(as_map(gt)), 1.0);
  EXPECT_EQ(binarize_adaptive(as_map(gt)), static_cast<const BinaryMask&>(gt));
  EXPECT_EQ(f_measure_adaptive(as_map(gt), gt), 1.0);
}

TEST(EMeasure, Examples) {
  SaliencyMask gt(4, 4);
  gt(0, 0) = gt(0, 1) = gt(1, 1) = 1;
  EXPECT_NEAR(e_measure(as_map(gt), gt), 1.0, 1e-12);
  EXPECT_EQ(e_measure(Map(4, 4, 0.0), SaliencyMask(4, 4, 0)), 1.0);
  EXPECT_EQ(e_measure(Map(4, 4, 1.0), SaliencyMask(4, 4, 1)), 1.0);
  EXPECT_EQ(e_measure(Map(4, 4, 0.0), SaliencyMask(4, 4, 1)), 0.0);
  EXPECT_THROW(e_measure(Map(4, 3), gt), InvalidArgument);
}

TEST(Metrics, MatchLoopOracles) {
  Rng rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const int h = rng.uniform_int(1, 9);
    const int w = rng.uniform_int(1, 9);
    const SaliencyMask gt = random_gt(rng, h, w);
    const Map pred = random_prediction(rng, gt);
    const MetricReport r = evaluate(pred, gt);
    ASSERT_NEAR(r.mae, oracle::mae(pred, gt), 1e-14);
    ASSERT_NEAR(r.f_ave, oracle::f_measure(pred, gt), 1e-14);
    ASSERT_NEAR(r.e_m, oracle::e_measure(pred, gt), 1e-14);
    ASSERT_EQ(r.n_images, 1u);
    for (double v : {r.mae, r.f_ave, r.e_m}) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
}

TEST(Metrics, PerfectBinaryPrediction) {
  Rng rng(103);
  for (int trial = 0; trial < 300; ++trial) {
    // Densities up to 0.98 exercise the majority-salient clamp.
    SaliencyMask gt = oracle::random_mask(rng, rng.uniform_int(1, 12), rng.uniform_int(1, 12),
                                          rng.uniform(0.02, 0.98));
    if (gt.count() == 0) gt.values()[0] = 1;
    const MetricReport r = evaluate(as_map(gt), gt);
    ASSERT_EQ(r.mae, 0.0);
    ASSERT_EQ(r.f_ave, 1.0);
    ASSERT_NEAR(r.e_m, 1.0, 1e-12);
  }
}

TEST(Metrics, FEqualsOneOnlyForExactBinarization) {
  Rng rng(107);
  for (int trial = 0; trial < 300; ++trial) {
    const SaliencyMask gt = random_gt(rng, 5, 5);
    const Map pred = random_prediction(rng, gt);
    const bool exact = binarize_adaptive(pred) == static_cast<const BinaryMask&>(gt) && gt.count() > 0;
    ASSERT_EQ(f_measure_adaptive(pred, gt) == 1.0, exact);
  }
}

TEST(Metrics, TranspositionInvariance) {
  Rng rng(109);
  for (int trial = 0; trial < 200; ++trial) {
    const SaliencyMask gt = random_gt(rng, rng.uniform_int(1, 8), rng.uniform_int(1, 8));
    const Map pred = random_prediction(rng, gt);
    const MetricReport a = evaluate(pred, gt);
    const MetricReport b = evaluate(transpose(pred), transpose(gt));
    ASSERT_NEAR(a.mae, b.mae, 1e-14);
    ASSERT_NEAR(a.f_ave, b.f_ave, 1e-14);
    ASSERT_NEAR(a.e_m, b.e_m, 1e-14);
  }
}

TEST(Metrics, MaeComplementIdentity) {
  Rng rng(113);
  for (int trial = 0; trial < 200; ++trial) {
    const SaliencyMask gt = random_gt(rng, 6, 7);
    const Map pred = oracle::random_map(rng, 6, 7);
    SaliencyMask flipped = gt;
    for (auto& v : flipped.values()) v = 1 - v;
    ASSERT_NEAR(mae(pred, gt), 1.0 - mae(pred, flipped), 1e-14);
  }
}

TEST(EvaluateCorpus, Averaging) {
  Rng rng(127);
  std::vector<std::pair<Map, SaliencyMask>> pairs;
  for (int i = 0; i < 3; ++i) {
    const SaliencyMask gt = oracle::random_mask(rng, 6, 6, 0.4);
    pairs.emplace_back(random_prediction(rng, gt), gt);
  }
  const MetricReport single = evaluate_corpus(std::span(pairs).first(1));
  const MetricReport direct = evaluate(pairs[0].first, pairs[0].second);
  EXPECT_EQ(single.mae, direct.mae);
  EXPECT_EQ(single.f_ave, direct.f_ave);
  EXPECT_EQ(single.e_m, direct.e_m);

  const std::vector<std::pair<Map, SaliencyMask>> twice{pairs[0], pairs[0]};
  const MetricReport doubled = evaluate_corpus(twice);
  EXPECT_EQ(doubled.mae, direct.mae);
  EXPECT_EQ(doubled.f_ave, direct.f_ave);
  EXPECT_EQ(doubled.e_m, direct.e_m);
  EXPECT_EQ(doubled.n_images, 2u);

  const MetricReport all = evaluate_corpus(pairs);
  double m = 0, f = 0, e = 0;
  for (const auto& [pred, gt] : pairs) {
    m += oracle::mae(pred, gt) / 3;
    f += oracle::f_measure(pred, gt) / 3;
    e += oracle::e_measure(pred, gt) / 3;
  }
  EXPECT_NEAR(all.mae, m, 1e-14);
  EXPECT_NEAR(all.f_ave, f, 1e-14);
  EXPECT_NEAR(all.e_m, e, 1e-14);
  EXPECT_EQ(all.n_images, 3u);

  EXPECT_THROW(evaluate_corpus({}), InvalidArgument);
}

}  // namespace
}  // namespace bicon
