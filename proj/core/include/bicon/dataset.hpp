#ifndef BICON_DATASET_HPP
#define BICON_DATASET_HPP

#include <cstdint>
#include <vector>

#include "bicon/types.hpp"

// Seeded synthetic salient-shape dataset.
namespace bicon {

inline constexpr double kMinSalientFraction = 0.05;
inline constexpr double kMaxSalientFraction = 0.6;
inline constexpr double kMinContrast = 0.3;
inline constexpr double kNoiseAmplitude = 0.1;

enum class ShapeKind { Rectangle, Ellipse };

struct ShapeSpec {
  ShapeKind kind;
  double center_y;
  double center_x;
  double half_height;
  double half_width;

  bool contains(int y, int x) const;
};

struct SyntheticSample {
  std::uint64_t id = 0;
  Map image;
  SaliencyMask mask;
  std::vector<ShapeSpec> shapes;
  double background = 0.0;
  double foreground = 0.0;
};

struct SyntheticDataset {
  std::vector<SyntheticSample> train;
  std::vector<SyntheticSample> test;
};

// Test ids start here so held-out samples do not depend on the train count.
inline constexpr std::uint64_t kTestIdOffset = std::uint64_t{1} << 32;

// One to three hard-edged rectangles/ellipses brighter than a noisy
// background. The mask is the exact union of the shapes and covers between
// 5% and 60% of the image. Pure function of (seed, id, height, width).
SyntheticSample generate_sample(std::uint64_t seed, std::uint64_t id, int height = 64,
                                int width = 64);

SyntheticDataset generate_dataset(std::uint64_t seed, int n_train, int n_test, int height = 64,
                                  int width = 64);

}  // namespace bicon

#endif  // BICON_DATASET_HPP
