#include "bicon/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "bicon/random.hpp"

namespace bicon {

namespace {

constexpr int kMaxAttempts = 10000;

ShapeSpec random_shape(Rng& rng, int height, int width) {
  ShapeSpec s{};
  s.kind = rng.uniform() < 0.5 ? ShapeKind::Rectangle : ShapeKind::Ellipse;
  s.half_height = std::max(1.0, rng.uniform(0.08, 0.3) * height);
  s.half_width = std::max(1.0, rng.uniform(0.08, 0.3) * width);
  s.center_y = rng.uniform(0.0, height - 1.0);
  s.center_x = rng.uniform(0.0, width - 1.0);
  return s;
}

}  // namespace

bool ShapeSpec::contains(int y, int x) const {
  const double dy = (y - center_y) / half_height;
  const double dx = (x - center_x) / half_width;
  if (kind == ShapeKind::Rectangle) return std::abs(dy) <= 1.0 && std::abs(dx) <= 1.0;
  return dy * dy + dx * dx <= 1.0;
}

SyntheticSample generate_sample(std::uint64_t seed, std::uint64_t id, int height, int width) {
  if (height < 4 || width < 4) throw InvalidArgument("generate_sample: image must be at least 4x4");
  Rng rng(seed, id);
  SyntheticSample sample;
  sample.id = id;

  for (int attempt = 0;; ++attempt) {
    if (attempt == kMaxAttempts) throw Error("generate_sample: could not satisfy area bounds");
    const int count = rng.uniform_int(1, 3);
    sample.shapes.clear();
    for (int i = 0; i < count; ++i) sample.shapes.push_back(random_shape(rng, height, width));

    sample.mask = SaliencyMask(height, width);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const bool inside = std::any_of(sample.shapes.begin(), sample.shapes.end(),
                                        [&](const ShapeSpec& s) { return s.contains(y, x); });
        sample.mask(y, x) = inside ? 1 : 0;
      }
    }
    const double fraction =
        static_cast<double>(sample.mask.count()) / static_cast<double>(sample.mask.size());
    if (fraction >= kMinSalientFraction && fraction <= kMaxSalientFraction) break;
  }

  sample.background = rng.uniform(0.05, 0.25);
  sample.foreground = std::min(sample.background + rng.uniform(0.35, 0.65), 0.95);
  sample.image = Map(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double base = sample.mask(y, x) ? sample.foreground : sample.background;
      const double noise = rng.uniform(-kNoiseAmplitude, kNoiseAmplitude);
      sample.image(y, x) = std::clamp(base + noise, 0.0, 1.0);
    }
  }
  return sample;
}

SyntheticDataset generate_dataset(std::uint64_t seed, int n_train, int n_test, int height,
                                  int width) {
  if (n_train < 1 || n_test < 1) throw InvalidArgument("generate_dataset: sizes must be >= 1");
  SyntheticDataset data;
  data.train.reserve(static_cast<std::size_t>(n_train));
  data.test.reserve(static_cast<std::size_t>(n_test));
  for (int i = 0; i < n_train; ++i) {
    data.train.push_back(generate_sample(seed, static_cast<std::uint64_t>(i), height, width));
  }
  for (int i = 0; i < n_test; ++i) {
    data.test.push_back(
        generate_sample(seed, kTestIdOffset + static_cast<std::uint64_t>(i), height, width));
  }
  return data;
}

}  // namespace bicon
