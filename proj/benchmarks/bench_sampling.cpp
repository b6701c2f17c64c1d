#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "swag/sampling.hpp"

namespace {

swag::WeightedGraph ring_graph(std::size_t nodes, std::size_t degree) {
  std::vector<swag::EdgeRecord> edges;
  swag::Rng rng(1);
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t d = 1; d <= degree / 2; ++d) {
      edges.push_back({std::to_string(i), std::to_string((i + d) % nodes), 1.0 - rng.uniform(), 0});
    }
  }
  return swag::build_graph(edges);
}

void BM_NeighborDraw(benchmark::State& state) {
  const auto g = ring_graph(10000, static_cast<std::size_t>(state.range(0)));
  const swag::NeighborSampler sampler(g, 1.0);
  swag::Rng rng(2);
  swag::NodeId u = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.draw(u, rng));
    u = (u + 1) % 10000;
  }
}
BENCHMARK(BM_NeighborDraw)->Arg(8)->Arg(64)->Arg(512);

void BM_LayeredBatch(benchmark::State& state) {
  const auto g = ring_graph(10000, 32);
  const swag::NeighborSampler sampler(g, 1.0);
  swag::Rng rng(3);
  std::vector<swag::NodeId> targets(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < targets.size(); ++i) targets[i] = static_cast<swag::NodeId>(i * 7);
  const std::vector<std::size_t> sizes{10, 5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(swag::build_layered_batch(sampler, targets, sizes, rng));
  }
}
BENCHMARK(BM_LayeredBatch)->Arg(64)->Arg(512);

void BM_PositivePairs(benchmark::State& state) {
  const auto g = ring_graph(static_cast<std::size_t>(state.range(0)), 16);
  const swag::NeighborSampler sampler(g, 1.0);
  swag::WalkConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(swag::positive_pairs(sampler, cfg));
}
BENCHMARK(BM_PositivePairs)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
