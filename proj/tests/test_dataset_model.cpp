#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "bicon/dataset.hpp"
#include "bicon/model.hpp"
#include "bicon/training.hpp"
#include "support/oracles.hpp"

namespace bicon {
namespace {

void randomize_head(ToyModel& model, std::uint64_t seed, double scale) {
  Rng rng(seed);
  const LayerSpec& head = model.layers().back();
  auto p = model.parameters();
  for (std::size_t i = 0; i < head.weight_count(); ++i) p[head.weight_offset + i] = rng.uniform(-scale, scale);
  for (int c = 0; c < head.out_channels; ++c) p[head.bias_offset + c] = rng.uniform(-scale, scale);
}

TEST(Dataset, Deterministic) {
  const SyntheticDataset a = generate_dataset(5, 4, 3, 32, 32);
  const SyntheticDataset b = generate_dataset(5, 4, 3, 32, 32);
  ASSERT_EQ(a.train.size(), 4u);
  ASSERT_EQ(a.test.size(), 3u);
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    EXPECT_EQ(a.train[i].image, b.train[i].image);
    EXPECT_EQ(a.train[i].mask, b.train[i].mask);
  }
  EXPECT_NE(generate_sample(5, 0, 32, 32).image, generate_sample(6, 0, 32, 32).image);
  // Held-out samples do not move when the train count changes.
  EXPECT_EQ(generate_dataset(5, 9, 3, 32, 32).test[1].image, a.test[1].image);
}

TEST(Dataset, MaskIsUnionOfShapes) {
  const SyntheticSample s = generate_sample(11, 0);
  ASSERT_GE(s.shapes.size(), 1u);
  ASSERT_LE(s.shapes.size(), 3u);
  for (int y = 0; y < s.mask.height(); ++y) {
    for (int x = 0; x < s.mask.width(); ++x) {
      bool inside = false;
      for (const ShapeSpec& shape : s.shapes) inside = inside || shape.contains(y, x);
      ASSERT_EQ(s.mask(y, x), inside ? 1 : 0);
    }
  }
}

TEST(Dataset, AreaContrastAndRangeOverManySamples) {
  for (std::uint64_t id = 0; id < 1000; ++id) {
    const SyntheticSample s = generate_sample(3, id);
    const double fraction = static_cast<double>(s.mask.count()) / static_cast<double>(s.mask.size());
    ASSERT_GE(fraction, kMinSalientFraction) << id;
    ASSERT_LE(fraction, kMaxSalientFraction) << id;
    ASSERT_GE(s.foreground - s.background, kMinContrast) << id;
    for (std::size_t i = 0; i < s.image.size(); ++i) {
      const double v = s.image.values()[i];
      ASSERT_TRUE(v >= 0.0 && v <= 1.0);
      const double clean = s.mask.values()[i] ? s.foreground : s.background;
      ASSERT_LE(std::fabs(v - clean), kNoiseAmplitude + 1e-12);
    }
  }
}

TEST(Dataset, RejectsBadSizes) {
  EXPECT_THROW(generate_dataset(1, 0, 1), InvalidArgument);
  EXPECT_THROW(generate_sample(1, 0, 2, 2), InvalidArgument);
}

TEST(Model, ZeroHeadGivesHalfEverywhere) {
  for (const HeadVariant v : {HeadVariant::Connectivity, HeadVariant::Saliency}) {
    const ToyModel model(v, 1);
    const Tensor3 out = model.forward(generate_sample(1, 0, 16, 16).image);
    EXPECT_EQ(out.channels, head_channels(v));
    EXPECT_EQ(out.height, 16);
    EXPECT_EQ(out.width, 16);
    for (double o : out.data) ASSERT_EQ(o, 0.5);
  }
}

TEST(Model, DeterministicFiniteAndInUnitInterval) {
  ToyModel a(HeadVariant::Connectivity, 4);
  ToyModel b(HeadVariant::Connectivity, 4);
  randomize_head(a, 9, 2.0);
  randomize_head(b, 9, 2.0);
  const Map image = generate_sample(2, 0, 20, 12).image;
  const Tensor3 oa = a.forward(image);
  EXPECT_EQ(oa.data, b.forward(image).data);
  EXPECT_NE(ToyModel(HeadVariant::Connectivity, 4).parameters()[0],
            ToyModel(HeadVariant::Connectivity, 5).parameters()[0]);
  for (double o : oa.data) ASSERT_TRUE(std::isfinite(o) && o > 0.0 && o < 1.0);
  const ConnGrid conn = to_conn_map(oa);
  EXPECT_EQ(conn.shape(), (Shape{20, 12}));
  EXPECT_EQ(conn.kind(), GridKind::ConnMap);
}

TEST(Model, ParameterParity) {
  const ToyModel conn(HeadVariant::Connectivity, 1);
  const ToyModel sal(HeadVariant::Saliency, 1);
  EXPECT_EQ(conn.parameter_count() - sal.parameter_count(), std::size_t{(8 - 1) * (16 + 1)});
  // 1->16, 16->16, 16->16 3x3 convs plus the head.
  const std::size_t trunk = (9 * 1 * 16 + 16) + 2 * (9 * 16 * 16 + 16);
  EXPECT_EQ(sal.parameter_count(), trunk + 17);
  for (std::size_t i = 0; i + 1 < conn.layers().size(); ++i) {
    EXPECT_EQ(conn.layers()[i].weight_offset, sal.layers()[i].weight_offset);
  }
}

TEST(Model, InitBounds) {
  const ToyModel model(HeadVariant::Connectivity, 2);
  for (std::size_t l = 0; l < model.layers().size(); ++l) {
    const LayerSpec& spec = model.layers()[l];
    const double k = 1.0 / std::sqrt(spec.in_channels * spec.kernel * spec.kernel);
    for (std::size_t i = 0; i < spec.weight_count(); ++i) {
      const double w = model.parameters()[spec.weight_offset + i];
      if (l + 1 == model.layers().size()) {
        ASSERT_EQ(w, 0.0);
      } else {
        ASSERT_LE(std::fabs(w), k);
      }
    }
  }
}

TEST(Model, ConverterRoundTrip) {
  Rng rng(8);
  const ConnGrid g = oracle::random_grid(rng, 3, 5);
  const Tensor3 t = from_grid_gradient(g);
  EXPECT_EQ(t.channels, 8);
  EXPECT_EQ(static_cast<const ChannelGrid&>(to_conn_map(t)), static_cast<const ChannelGrid&>(g));
  const Map m = oracle::random_map(rng, 4, 2);
  EXPECT_EQ(to_saliency_map(from_map_gradient(m)), m);
}

class ModelGradient : public ::testing::TestWithParam<LossKind> {};

TEST_P(ModelGradient, MatchesFiniteDifferences) {
  TrainConfig config;
  config.loss = GetParam();
  config.variant = config.loss == LossKind::SaliencyBce ? HeadVariant::Saliency : HeadVariant::Connectivity;
  ToyModel model(config.variant, 21);
  randomize_head(model, 22, 0.5);
  const SyntheticSample s = generate_sample(23, 0, 8, 8);

  std::vector<double> analytic(model.parameter_count(), 0.0);
  sample_objective(model, config, s.image, s.mask, analytic);

  Rng rng(24);
  std::set<std::size_t> picked;
  while (picked.size() < 50) {
    picked.insert(static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(model.parameter_count()) - 1)));
  }
  std::vector<double> a, n;
  const double h = 1e-5;
  for (std::size_t i : picked) {
    const double saved = model.parameters()[i];
    model.parameters()[i] = saved + h;
    const double up = sample_objective(model, config, s.image, s.mask, {});
    model.parameters()[i] = saved - h;
    const double down = sample_objective(model, config, s.image, s.mask, {});
    model.parameters()[i] = saved;
    a.push_back(analytic[i]);
    n.push_back((up - down) / (2 * h));
  }
  EXPECT_LE(oracle::relative_error(a, n), 1e-3);
}

INSTANTIATE_TEST_SUITE_P(Losses, ModelGradient,
                         ::testing::Values(LossKind::SaliencyBce, LossKind::ConnMap,
                                           LossKind::GlobalBce, LossKind::Decouple,
                                           LossKind::Bicon));

}  // namespace
}  // namespace bicon
