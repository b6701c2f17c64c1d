#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "swag/eval.hpp"

namespace {

swag::Embeddings random_embeddings(std::size_t n, std::size_t dim) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(n));
  v.colwise().normalize();
  std::vector<std::string> keys;
  for (std::size_t i = 0; i < n; ++i) keys.push_back(std::to_string(i));
  return swag::Embeddings(std::move(keys), std::move(v));
}

void BM_Knn(benchmark::State& state) {
  const auto emb = random_embeddings(static_cast<std::size_t>(state.range(0)), 128);
  swag::NodeId q = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(swag::knn(emb, q, 25));
    q = static_cast<swag::NodeId>((q + 1) % emb.size());
  }
}
BENCHMARK(BM_Knn)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_Evaluate(benchmark::State& state) {
  const auto emb = random_embeddings(10000, 128);
  std::vector<swag::TestRecord> records;
  swag::Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    records.push_back({std::to_string(rng.below(10000)), {std::to_string(rng.below(10000))}});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        swag::evaluate(emb, records, 5, static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_Evaluate)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_CosineHistogram(benchmark::State& state) {
  const auto emb = random_embeddings(10000, 128);
  swag::Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(swag::cosine_histogram(emb, 10000, 40, rng));
}
BENCHMARK(BM_CosineHistogram)->Unit(benchmark::kMillisecond);

}  // namespace
