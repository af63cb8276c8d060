#include "bicon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bicon {

namespace {

void check_pair(const Map& pred, const SaliencyMask& gt, const char* what) {
  require_same_shape(pred.shape(), gt.shape(), what);
  gt.validate(what);
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double mae(const Map& pred, const SaliencyMask& gt) {
  check_pair(pred, gt, "mae");
  const auto p = pred.values();
  const auto g = gt.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - static_cast<double>(g[i]));
  return sum / static_cast<double>(p.size());
}

double adaptive_threshold(const Map& pred) {
  return std::min(2.0 * mean_of(pred.values()), 1.0);
}

BinaryMask binarize_adaptive(const Map& pred) {
  if (pred.shape().empty()) throw InvalidArgument("binarize_adaptive: empty map");
  const double t = adaptive_threshold(pred);
  BinaryMask out(pred.height(), pred.width());
  const auto p = pred.values();
  auto b = out.values();
  for (std::size_t i = 0; i < p.size(); ++i) b[i] = (p[i] > 0.0 && p[i] >= t) ? 1 : 0;
  return out;
}

double f_measure_adaptive(const Map& pred, const SaliencyMask& gt) {
  check_pair(pred, gt, "f_measure_adaptive");
  const BinaryMask bin = binarize_adaptive(pred);
  const auto b = bin.values();
  const auto g = gt.values();
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] && g[i]) ++tp;
    else if (b[i]) ++fp;
    else if (g[i]) ++fn;
  }
  if (tp + fp == 0 || tp + fn == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double denom = kFBetaSquared * precision + recall;
  if (denom == 0.0) return 0.0;
  return (1.0 + kFBetaSquared) * precision * recall / denom;
}

double e_measure(const Map& pred, const SaliencyMask& gt) {
  check_pair(pred, gt, "e_measure");
  const BinaryMask bin = binarize_adaptive(pred);
  const auto b = bin.values();
  const auto g = gt.values();
  const double n = static_cast<double>(g.size());
  const std::size_t salient = gt.count();
  const double mean_b = static_cast<double>(bin.count()) / n;

  if (salient == 0) return 1.0 - mean_b;
  if (salient == g.size()) return mean_b;

  const double mean_g = static_cast<double>(salient) / n;
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double phi_g = static_cast<double>(g[i]) - mean_g;
    const double phi_b = static_cast<double>(b[i]) - mean_b;
    const double align = 2.0 * phi_g * phi_b / (phi_g * phi_g + phi_b * phi_b + kAlignmentEpsilon);
    sum += 0.25 * (1.0 + align) * (1.0 + align);
  }
  return sum / n;
}

MetricReport evaluate(const Map& pred, const SaliencyMask& gt) {
  return {mae(pred, gt), f_measure_adaptive(pred, gt), e_measure(pred, gt), 1};
}

MetricReport evaluate_corpus(std::span<const std::pair<Map, SaliencyMask>> pairs) {
  if (pairs.empty()) throw InvalidArgument("evaluate_corpus: empty corpus");
  MetricReport sum;
  for (const auto& [pred, gt] : pairs) {
    const MetricReport one = evaluate(pred, gt);
    sum.mae += one.mae;
    sum.f_ave += one.f_ave;
    sum.e_m += one.e_m;
  }
  const double n = static_cast<double>(pairs.size());
  return {sum.mae / n, sum.f_ave / n, sum.e_m / n, pairs.size()};
}

}  // namespace bicon
