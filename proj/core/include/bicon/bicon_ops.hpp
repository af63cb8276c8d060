#ifndef BICON_BICON_OPS_HPP
#define BICON_BICON_OPS_HPP

#include "bicon/types.hpp"

// Bilateral voting and region-guided channel aggregation, each with an
// analytic vector-Jacobian product.
namespace bicon {

// Both entries of every connectivity pair receive the product of the pair.
// Input values must lie in [0, 1]; the result is exactly pair-consistent.
ConnGrid bilateral_vote(const ChannelGrid& conn);

// VJP of bilateral_vote. grad(p) = (upstream(p) + upstream(q)) * conn(q)
// with q the pair partner of p; self-paired border entries get 2 * u * c.
GridGradient bilateral_vote_backward(const ChannelGrid& conn, const GridGradient& upstream);

enum class AggregationMode { Global, EdgeDecoupled };

// Channel mean at every pixel.
Map aggregate_global(const ChannelGrid& bicon);

// 1 - min over channels at edge pixels, channel mean elsewhere.
Map aggregate_decoupled(const ChannelGrid& bicon, const EdgeMask& edges);

// Lowest-index channel holding the minimum of the vector at (y, x).
int argmin_channel(const ChannelGrid& grid, int y, int x);

// VJP of either aggregation. `edges` is ignored in Global mode. At edge pixels
// the full -upstream goes to argmin_channel (a subgradient when minima tie).
GridGradient aggregate_backward(const ChannelGrid& bicon, const EdgeMask& edges,
                                AggregationMode mode, const Map& upstream);
GridGradient aggregate_global_backward(Shape shape, const Map& upstream);

}  // namespace bicon

#endif  // BICON_BICON_OPS_HPP
