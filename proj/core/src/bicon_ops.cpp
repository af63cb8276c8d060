#include "bicon/bicon_ops.hpp"

#include <algorithm>
#include <numeric>

#include "bicon/conn_codec.hpp"

namespace bicon {

namespace {

double channel_mean(std::span<const double, kChannels> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / kChannels;
}

}  // namespace

ConnGrid bilateral_vote(const ChannelGrid& conn) {
  const Shape shape = conn.shape();
  if (shape.empty()) throw InvalidArgument("bilateral_vote: empty grid");
  for (const double v : conn.values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("bilateral_vote: value outside [0, 1]");
  }
  ConnGrid out(shape.height, shape.width, GridKind::BiconMap);
  for (int y = 0; y < shape.height; ++y) {
    for (int x = 0; x < shape.width; ++x) {
      for (int c = 0; c < kChannels; ++c) {
        const GridLocation q = pair_lookup(shape, y, x, c);
        out(y, x, c) = conn(y, x, c) * conn(q.y, q.x, q.channel);
      }
    }
  }
  return out;
}

GridGradient bilateral_vote_backward(const ChannelGrid& conn, const GridGradient& upstream) {
  const Shape shape = conn.shape();
  require_same_shape(shape, upstream.shape(), "bilateral_vote_backward");
  GridGradient grad(shape);
  for (int y = 0; y < shape.height; ++y) {
    for (int x = 0; x < shape.width; ++x) {
      for (int c = 0; c < kChannels; ++c) {
        const GridLocation q = pair_lookup(shape, y, x, c);
        grad(y, x, c) =
            (upstream(y, x, c) + upstream(q.y, q.x, q.channel)) * conn(q.y, q.x, q.channel);
      }
    }
  }
  return grad;
}

Map aggregate_global(const ChannelGrid& bicon) {
  Map out(bicon.height(), bicon.width());
  for (int y = 0; y < bicon.height(); ++y) {
    for (int x = 0; x < bicon.width(); ++x) out(y, x) = channel_mean(bicon.vector_at(y, x));
  }
  return out;
}

int argmin_channel(const ChannelGrid& grid, int y, int x) {
  const auto v = grid.vector_at(y, x);
  int best = 0;
  for (int c = 1; c < kChannels; ++c) {
    if (v[c] < v[best]) best = c;
  }
  return best;
}

Map aggregate_decoupled(const ChannelGrid& bicon, const EdgeMask& edges) {
  require_same_shape(bicon.shape(), edges.shape(), "aggregate_decoupled");
  Map out(bicon.height(), bicon.width());
  for (int y = 0; y < bicon.height(); ++y) {
    for (int x = 0; x < bicon.width(); ++x) {
      if (edges(y, x) != 0) {
        out(y, x) = 1.0 - bicon(y, x, argmin_channel(bicon, y, x));
      } else {
        out(y, x) = channel_mean(bicon.vector_at(y, x));
      }
    }
  }
  return out;
}

GridGradient aggregate_global_backward(Shape shape, const Map& upstream) {
  require_same_shape(shape, upstream.shape(), "aggregate_global_backward");
  GridGradient grad(shape);
  for (int y = 0; y < shape.height; ++y) {
    for (int x = 0; x < shape.width; ++x) {
      const double share = upstream(y, x) / kChannels;
      for (double& g : grad.vector_at(y, x)) g = share;
    }
  }
  return grad;
}

GridGradient aggregate_backward(const ChannelGrid& bicon, const EdgeMask& edges,
                                AggregationMode mode, const Map& upstream) {
  if (mode == AggregationMode::Global) return aggregate_global_backward(bicon.shape(), upstream);
  require_same_shape(bicon.shape(), edges.shape(), "aggregate_backward");
  GridGradient grad = aggregate_global_backward(bicon.shape(), upstream);
  for (int y = 0; y < bicon.height(); ++y) {
    for (int x = 0; x < bicon.width(); ++x) {
      if (edges(y, x) == 0) continue;
      auto g = grad.vector_at(y, x);
      std::fill(g.begin(), g.end(), 0.0);
      g[argmin_channel(bicon, y, x)] = -upstream(y, x);
    }
  }
  return grad;
}

}  // namespace bicon
