#ifndef BICON_TESTS_ORACLES_HPP
#define BICON_TESTS_ORACLES_HPP

// Independent reference implementations used by the test suites. Nothing in
// here calls into the library code it is used to check.

#include <functional>
#include <span>
#include <vector>

#include "bicon/random.hpp"
#include "bicon/types.hpp"

namespace bicon::oracle {

// ---- generators -----------------------------------------------------------

SaliencyMask random_mask(Rng& rng, int height, int width, double density);
// Random mask of random size in [1, max_extent]^2 and random density.
SaliencyMask random_mask(Rng& rng, int max_extent);
// Grid with entries uniform in [lo, hi].
ConnGrid random_grid(Rng& rng, int height, int width, double lo = 0.0, double hi = 1.0);
// Grid whose per-pixel minimum beats the runner-up by at least `gap`.
ConnGrid random_grid_distinct_min(Rng& rng, int height, int width, double gap, double lo = 0.05,
                                  double hi = 0.95);
Map random_map(Rng& rng, int height, int width);
EdgeMask random_edges(Rng& rng, int height, int width);

// ---- connectivity codec ---------------------------------------------------

int reflect(int v, int extent);
// Row-major 1-based direction numbering, returned 0-based.
int direction_index(int dy, int dx);
// Literal per-entry definition of the connectivity mask.
ConnGrid encode(const SaliencyMask& mask);
SaliencyMask decode(const ConnGrid& grid);
EdgeMask edges(const ConnGrid& grid);
bool has_isolated_pixel(const SaliencyMask& mask);

struct Entry {
  int y, x, c;
};
// Partner entry, worked out axis by axis: an axis that stays inside the image
// points back (opposite sign); an axis that leaves it is mirrored onto the
// pixel itself and keeps its sign.
Entry partner(Shape shape, int y, int x, int c);

// ---- operators --------------------------------------------------------------

ConnGrid vote(const ChannelGrid& conn);
Map mean_aggregate(const ChannelGrid& grid);
Map decoupled_aggregate(const ChannelGrid& grid, const EdgeMask& edges);

double bce_term(double pred, double label);  // clamped at 1e-7
double mean_bce(std::span<const double> pred, std::span<const double> label);
std::vector<double> as_doubles(const BinaryMask& mask);
std::vector<double> as_doubles(const Map& map);

// ---- losses -----------------------------------------------------------------

// Random mask without isolated pixels, so every connectivity label decodes.
SaliencyMask clean_mask(Rng& rng, int height, int width);
ChannelGrid from_span(Shape shape, std::span<const double> values);
// sum_i r_i * v_i, turns a vector function into a scalar one for VJP checks.
double project(std::span<const double> r, std::span<const double> v);

// Mean BCE of the edge-decoupled map, written from its two branches.
double decouple_loss(const ChannelGrid& bicon, const EdgeMask& edges, const SaliencyMask& gt);
double consistency_loss(const ChannelGrid& conn, const ConnGrid& gt, double w1, double w2);
double total_loss(const ChannelGrid& conn, const ConnGrid& gt, const SaliencyMask& mask, double w1,
                  double w2);

// ---- metrics ----------------------------------------------------------------

double mae(const Map& pred, const SaliencyMask& gt);
double f_measure(const Map& pred, const SaliencyMask& gt);
double e_measure(const Map& pred, const SaliencyMask& gt);

// ---- finite differences ------------------------------------------------------

// Central differences of f at x with step h.
std::vector<double> numeric_gradient(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> x, double h = 1e-5);

// ||a - b|| / max(||a||, ||b||), 0 when both vanish.
double relative_error(std::span<const double> a, std::span<const double> b);

}  // namespace bicon::oracle

#endif  // BICON_TESTS_ORACLES_HPP
