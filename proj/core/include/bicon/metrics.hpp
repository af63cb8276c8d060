#ifndef BICON_METRICS_HPP
#define BICON_METRICS_HPP

#include <cstddef>
#include <span>
#include <utility>

#include "bicon/types.hpp"

// Salient object detection metrics: MAE, adaptive-threshold mean F-measure
// and E-measure, plus corpus averaging.
namespace bicon {

inline constexpr double kFBetaSquared = 0.3;

// Added to the E-measure alignment denominator. Matches the machine epsilon
// used by the reference E-measure implementation.
inline constexpr double kAlignmentEpsilon = 2.220446049250313e-16;

struct MetricReport {
  double mae = 0.0;
  double f_ave = 0.0;
  double e_m = 0.0;
  std::size_t n_images = 0;
};

double mae(const Map& pred, const SaliencyMask& gt);

// min(2 * mean(pred), 1).
double adaptive_threshold(const Map& pred);

// pred >= adaptive_threshold(pred), restricted to strictly positive pixels so
// an all-zero prediction binarizes to the empty set.
BinaryMask binarize_adaptive(const Map& pred);

double f_measure_adaptive(const Map& pred, const SaliencyMask& gt);
double e_measure(const Map& pred, const SaliencyMask& gt);

MetricReport evaluate(const Map& pred, const SaliencyMask& gt);

// Arithmetic mean of per-image metrics, summed in list order.
MetricReport evaluate_corpus(std::span<const std::pair<Map, SaliencyMask>> pairs);

}  // namespace bicon

#endif  // BICON_METRICS_HPP
