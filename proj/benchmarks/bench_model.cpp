#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "swag/model.hpp"

namespace {

struct Fixture {
  swag::WeightedGraph graph;
  swag::FeatureMatrix features;
  swag::Hyperparams hp;
  swag::ModelParams params;
  swag::PairBatch pairs;
  swag::LayeredBatch batch;
};

Fixture make(swag::Aggregator agg) {
  Fixture f;
  std::vector<swag::EdgeRecord> edges;
  swag::Rng rng(1);
  const std::size_t n = 2000;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 1; d <= 8; ++d) {
      edges.push_back({std::to_string(i), std::to_string((i + d * 37) % n), 1.0 - rng.uniform(), 0});
    }
  }
  f.graph = swag::build_graph(edges);
  f.features.primary = Eigen::MatrixXd::Random(64, static_cast<Eigen::Index>(n));
  f.hp.alpha = f.hp.beta = f.hp.gamma = 1.0;
  f.hp.aggregators = {agg, agg};
  f.params = swag::init_params(f.hp, 64, 0, rng);
  for (std::size_t p = 0; p < 64; ++p) {
    const auto u = static_cast<swag::NodeId>(rng.below(n));
    const auto v = static_cast<swag::NodeId>(rng.below(n));
    f.pairs.pairs.push_back({u, v, 0.5});
    std::vector<swag::NodeId> negs;
    for (std::size_t q = 0; q < 5; ++q) negs.push_back(static_cast<swag::NodeId>(rng.below(n)));
    f.pairs.negatives.push_back(negs);
  }
  const swag::NeighborSampler sampler(f.graph, f.hp.beta);
  f.batch = swag::build_layered_batch(sampler, f.pairs.nodes(), f.hp.layer_sizes, rng);
  return f;
}

void BM_Forward(benchmark::State& state) {
  const auto f = make(static_cast<swag::Aggregator>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(swag::forward(f.batch, f.features, f.params, f.hp));
}
BENCHMARK(BM_Forward)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_LossAndGradient(benchmark::State& state) {
  const auto f = make(static_cast<swag::Aggregator>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        swag::batch_loss_and_gradient(f.pairs, f.batch, f.features, f.params, f.hp));
  }
}
BENCHMARK(BM_LossAndGradient)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace
