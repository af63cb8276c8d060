#ifndef BICON_BICON_LOSS_HPP
#define BICON_BICON_LOSS_HPP

#include <functional>
#include <span>

#include "bicon/types.hpp"

// Bicon loss: L_decouple + w1 * L_conmap + w2 * L_bimap + L_opt.
//
// Every BCE term is mean-reduced over its elements (pixels for single-channel
// maps, pixel-channel entries for connectivity grids). Predictions are
// clamped to [kBceEpsilon, 1 - kBceEpsilon] before the logarithm and the
// gradient is zero wherever the clamp is active.
namespace bicon {

inline constexpr double kBceEpsilon = 1e-7;

struct LossWeights {
  double conmap = 0.8;
  double bimap = 0.2;
};

// Unreduced loss of a single prediction against a binary label:
// -log(clamp(p)) for label 1, -log(clamp(1 - p)) for label 0.
double bce_element(double pred, bool label);

// d bce_element / d pred, zero inside the clamped region.
double bce_element_derivative(double pred, bool label);

struct MapLoss {
  double value = 0.0;
  Map gradient;
};

struct GridLoss {
  double value = 0.0;
  GridGradient gradient;
};

// Mean BCE and its gradient. Targets must be binary.
MapLoss bce(const Map& pred, const BinaryMask& target);
GridLoss bce(const ChannelGrid& pred, const ConnGrid& target);

// Mean BCE between aggregate_decoupled(bicon, edges) and the saliency mask.
// Requires every edge pixel to be salient. The gradient is w.r.t. bicon.
GridLoss decouple_loss(const ChannelGrid& bicon, const EdgeMask& edges,
                       const SaliencyMask& saliency_gt);

// Per-entry, unweighted BCE surfaces of the two connectivity terms.
struct LossMaps {
  ChannelGrid conmap;
  ChannelGrid bimap;
};

struct ConsistencyLoss {
  double value = 0.0;  // w1 * conmap + w2 * bimap
  double conmap = 0.0;
  double bimap = 0.0;
  GridGradient gradient;  // w.r.t. conn
  LossMaps maps;
};

// w1 * BCE(conn, G_C) + w2 * BCE(bicon, G_C), where bicon must be
// bilateral_vote(conn). Gradient chains the bimap term through the vote.
ConsistencyLoss connectivity_consistency_loss(const ChannelGrid& conn, const ChannelGrid& bicon,
                                              const ConnGrid& conn_gt, LossWeights weights);

// Optional backbone loss evaluated on the global map.
using OptionalLoss = std::function<MapLoss(const Map& global_map, const SaliencyMask& saliency_gt)>;

struct LossValue {
  double total = 0.0;
  double decouple = 0.0;
  double conmap = 0.0;
  double bimap = 0.0;
  double optional = 0.0;
};

struct BiconLoss {
  LossValue value;
  GridGradient gradient;  // w.r.t. conn
  LossMaps maps;
};

// Per-pixel channel means of both loss maps, divided by their shared maximum
// so the two surfaces are directly comparable. All-zero maps stay zero.
struct LossSurfaces {
  Map conmap;
  Map bimap;
};
LossSurfaces loss_surfaces(const LossMaps& maps);

BiconLoss bicon_total_loss(const ChannelGrid& conn, const ConnGrid& conn_gt,
                           const SaliencyMask& saliency_gt, LossWeights weights,
                           const OptionalLoss& optional = {});

}  // namespace bicon

#endif  // BICON_BICON_LOSS_HPP
