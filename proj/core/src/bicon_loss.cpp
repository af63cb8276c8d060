#include "bicon/bicon_loss.hpp"

#include <algorithm>
#include <cmath>

#include "bicon/bicon_ops.hpp"
#include "bicon/conn_codec.hpp"

namespace bicon {

namespace {

constexpr double kClampHigh = 1.0 - kBceEpsilon;

// Probability assigned to the labelled class.
double label_probability(double pred, bool label) { return label ? pred : 1.0 - pred; }

template <typename T>
bool is_binary_value(T v) {
  return v == T{0} || v == T{1};
}

// Mean-reduced BCE over matching spans; writes d(mean)/d(pred) into grad.
template <typename Label>
double reduce_bce(std::span<const double> pred, std::span<const Label> target,
                  std::span<double> grad) {
  const double inv_n = 1.0 / static_cast<double>(pred.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool label = target[i] != Label{0};
    sum += bce_element(pred[i], label);
    grad[i] = bce_element_derivative(pred[i], label) * inv_n;
  }
  return sum * inv_n;
}

struct ConsistencyParts {
  double conmap;
  double bimap;
  GridGradient conmap_grad;  // d L_conmap / d conn
  GridGradient bimap_grad;   // d L_bimap / d bicon
  LossMaps maps;
};

ConsistencyParts consistency_parts(const ChannelGrid& conn, const ChannelGrid& bicon,
                                   const ConnGrid& conn_gt) {
  require_same_shape(conn.shape(), conn_gt.shape(), "connectivity_consistency_loss");
  require_same_shape(bicon.shape(), conn_gt.shape(), "connectivity_consistency_loss");
  if (!conn_gt.is_binary()) {
    throw InvalidArgument("connectivity_consistency_loss: ground-truth grid is not binary");
  }
  GridLoss conmap = bce(conn, conn_gt);
  GridLoss bimap = bce(bicon, conn_gt);
  LossMaps maps{ChannelGrid(conn.shape()), ChannelGrid(conn.shape())};
  const auto gt = conn_gt.values();
  for (std::size_t i = 0; i < gt.size(); ++i) {
    maps.conmap.values()[i] = bce_element(conn.values()[i], gt[i] != 0.0);
    maps.bimap.values()[i] = bce_element(bicon.values()[i], gt[i] != 0.0);
  }
  return {conmap.value, bimap.value, std::move(conmap.gradient), std::move(bimap.gradient),
          std::move(maps)};
}

void add_scaled(GridGradient& into, const GridGradient& from, double scale) {
  auto dst = into.values();
  const auto src = from.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
}

}  // namespace

double bce_element(double pred, bool label) {
  const double q = std::clamp(label_probability(pred, label), kBceEpsilon, kClampHigh);
  return -std::log(q);
}

double bce_element_derivative(double pred, bool label) {
  const double q = label_probability(pred, label);
  if (q < kBceEpsilon || q > kClampHigh) return 0.0;
  return label ? -1.0 / q : 1.0 / q;
}

MapLoss bce(const Map& pred, const BinaryMask& target) {
  require_same_shape(pred.shape(), target.shape(), "bce");
  target.validate("bce target");
  MapLoss out{0.0, Map(pred.height(), pred.width())};
  out.value = reduce_bce<std::uint8_t>(pred.values(), target.values(), out.gradient.values());
  return out;
}

GridLoss bce(const ChannelGrid& pred, const ConnGrid& target) {
  require_same_shape(pred.shape(), target.shape(), "bce");
  if (pred.shape().empty()) throw InvalidArgument("bce: empty grid");
  const auto t = target.values();
  if (!std::all_of(t.begin(), t.end(), is_binary_value<double>)) {
    throw InvalidArgument("bce: target grid is not binary");
  }
  GridLoss out{0.0, GridGradient(pred.shape())};
  out.value = reduce_bce<double>(pred.values(), t, out.gradient.values());
  return out;
}

GridLoss decouple_loss(const ChannelGrid& bicon, const EdgeMask& edges,
                       const SaliencyMask& saliency_gt) {
  require_same_shape(bicon.shape(), edges.shape(), "decouple_loss");
  require_same_shape(bicon.shape(), saliency_gt.shape(), "decouple_loss");
  edges.validate("decouple_loss edges");
  const auto e = edges.values();
  const auto s = saliency_gt.values();
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] != 0 && s[i] == 0) {
      throw InvalidArgument("decouple_loss: edge pixel is not salient in the ground truth");
    }
  }
  const Map decoupled = aggregate_decoupled(bicon, edges);
  MapLoss pixel = bce(decoupled, saliency_gt);
  return {pixel.value,
          aggregate_backward(bicon, edges, AggregationMode::EdgeDecoupled, pixel.gradient)};
}

ConsistencyLoss connectivity_consistency_loss(const ChannelGrid& conn, const ChannelGrid& bicon,
                                              const ConnGrid& conn_gt, LossWeights weights) {
  ConsistencyParts parts = consistency_parts(conn, bicon, conn_gt);
  GridGradient through_vote = parts.bimap_grad;
  for (double& g : through_vote.values()) g *= weights.bimap;
  GridGradient grad = bilateral_vote_backward(conn, through_vote);
  add_scaled(grad, parts.conmap_grad, weights.conmap);
  return {weights.conmap * parts.conmap + weights.bimap * parts.bimap, parts.conmap, parts.bimap,
          std::move(grad), std::move(parts.maps)};
}

LossSurfaces loss_surfaces(const LossMaps& maps) {
  LossSurfaces out{aggregate_global(maps.conmap), aggregate_global(maps.bimap)};
  double peak = 0.0;
  for (const Map* m : {&out.conmap, &out.bimap}) {
    for (double v : m->values()) peak = std::max(peak, v);
  }
  if (peak > 0.0) {
    for (Map* m : {&out.conmap, &out.bimap}) {
      for (double& v : m->values()) v /= peak;
    }
  }
  return out;
}

BiconLoss bicon_total_loss(const ChannelGrid& conn, const ConnGrid& conn_gt,
                           const SaliencyMask& saliency_gt, LossWeights weights,
                           const OptionalLoss& optional) {
  require_same_shape(conn.shape(), saliency_gt.shape(), "bicon_total_loss");
  const ConnGrid bicon = bilateral_vote(conn);
  const EdgeMask edges = extract_edge_mask(conn_gt);

  GridLoss decouple = decouple_loss(bicon, edges, saliency_gt);
  ConsistencyParts parts = consistency_parts(conn, bicon, conn_gt);

  // Everything routed through the Bicon map is collected before one vote VJP.
  GridGradient upstream = std::move(decouple.gradient);
  add_scaled(upstream, parts.bimap_grad, weights.bimap);

  double optional_value = 0.0;
  if (optional) {
    const Map global = aggregate_global(bicon);
    MapLoss hook = optional(global, saliency_gt);
    require_same_shape(hook.gradient.shape(), global.shape(), "optional loss gradient");
    optional_value = hook.value;
    add_scaled(upstream, aggregate_global_backward(bicon.shape(), hook.gradient), 1.0);
  }

  GridGradient grad = bilateral_vote_backward(conn, upstream);
  add_scaled(grad, parts.conmap_grad, weights.conmap);

  LossValue value;
  value.decouple = decouple.value;
  value.conmap = parts.conmap;
  value.bimap = parts.bimap;
  value.optional = optional_value;
  value.total = value.decouple + weights.conmap * value.conmap + weights.bimap * value.bimap +
                value.optional;
  return {value, std::move(grad), std::move(parts.maps)};
}

}  // namespace bicon
