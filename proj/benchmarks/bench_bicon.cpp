#include <benchmark/benchmark.h>

#include "bicon/bicon_loss.hpp"
#include "bicon/bicon_ops.hpp"
#include "bicon/conn_codec.hpp"
#include "bicon/dataset.hpp"
#include "bicon/model.hpp"
#include "bicon/random.hpp"

namespace {

using namespace bicon;

ConnGrid noisy_conn(const SaliencyMask& mask, std::uint64_t seed) {
  ConnGrid conn = encode_connectivity(mask);
  conn.set_kind(GridKind::ConnMap);
  Rng rng(seed);
  for (double& v : conn.values()) v = 0.1 + 0.8 * v + rng.uniform(-0.05, 0.05);
  return conn;
}

void BM_Encode(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SaliencyMask mask = generate_sample(1, 0, n, n).mask;
  for (auto _ : state) benchmark::DoNotOptimize(encode_connectivity(mask));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Encode)->Arg(64)->Arg(256);

void BM_BilateralVote(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ConnGrid conn = noisy_conn(generate_sample(1, 0, n, n).mask, 2);
  for (auto _ : state) benchmark::DoNotOptimize(bilateral_vote(conn));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_BilateralVote)->Arg(64)->Arg(256);

void BM_AggregateDecoupled(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SaliencyMask mask = generate_sample(1, 0, n, n).mask;
  const EdgeMask edges = extract_edge_mask(encode_connectivity(mask));
  const ConnGrid bicon = bilateral_vote(noisy_conn(mask, 3));
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_decoupled(bicon, edges));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_AggregateDecoupled)->Arg(64)->Arg(256);

void BM_BiconTotalLoss(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SaliencyMask mask = generate_sample(1, 0, n, n).mask;
  const ConnGrid gt = encode_connectivity(mask);
  const ConnGrid conn = noisy_conn(mask, 4);
  for (auto _ : state) benchmark::DoNotOptimize(bicon_total_loss(conn, gt, mask, {}));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_BiconTotalLoss)->Arg(64)->Arg(256);

void BM_ModelForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ToyModel model(HeadVariant::Connectivity, 1);
  const Map image = generate_sample(1, 0, n, n).image;
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(image));
}
BENCHMARK(BM_ModelForward)->Arg(64);

void BM_ModelForwardBackward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ToyModel model(HeadVariant::Connectivity, 1);
  const Map image = generate_sample(1, 0, n, n).image;
  std::vector<double> grad(model.parameter_count());
  for (auto _ : state) {
    ForwardCache cache;
    const Tensor3 out = model.forward(image, &cache);
    model.backward(cache, Tensor3(out.channels, out.height, out.width, 1.0), grad);
    benchmark::DoNotOptimize(grad.data());
  }
}
BENCHMARK(BM_ModelForwardBackward)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
