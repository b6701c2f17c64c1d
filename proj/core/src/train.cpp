#include "swag/train.hpp"

#include <cmath>
#include <numeric>

#include "swag/error.hpp"

namespace swag {

namespace {

void check_features(const WeightedGraph& g, const FeatureMatrix& f) {
  if (f.nodes() != g.node_count()) {
    throw ShapeError("feature matrix has " + std::to_string(f.nodes()) + " rows for " +
                     std::to_string(g.node_count()) + " nodes");
  }
  if (f.fused() && static_cast<std::size_t>(f.secondary->cols()) != g.node_count()) {
    throw ShapeError("secondary feature matrix does not cover every node");
  }
}

}  // namespace

Embeddings::Embeddings(std::vector<std::string> keys, Eigen::MatrixXd vectors)
    : keys_(std::move(keys)), vectors_(std::move(vectors)) {
  if (static_cast<std::size_t>(vectors_.cols()) != keys_.size()) {
    throw ShapeError("embedding count does not match key count");
  }
  index_.reserve(keys_.size());
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (!index_.emplace(keys_[i], static_cast<NodeId>(i)).second) {
      throw InputError("duplicate embedding key '" + keys_[i] + "'");
    }
  }
}

std::optional<NodeId> Embeddings::find(std::string_view key) const {
  const auto it = index_.find(std::string(key));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ModelParams initial_params(const FeatureMatrix& features, const Hyperparams& hp,
                           std::uint64_t seed) {
  Rng rng(derive_seed(seed, kInitStream));
  return init_params(hp, features.dim(), features.secondary_dim(), rng);
}

TrainResult train(const WeightedGraph& g, const FeatureMatrix& features, const Hyperparams& hp,
                  std::uint64_t seed, const EpochCallback& on_epoch) {
  hp.check();
  return train_from(g, features, hp, initial_params(features, hp, seed), seed, on_epoch);
}

TrainResult train_from(const WeightedGraph& g, const FeatureMatrix& features,
                       const Hyperparams& hp, ModelParams params, std::uint64_t seed,
                       const EpochCallback& on_epoch) {
  hp.check();
  check_features(g, features);
  const NeighborSampler sampler(g, hp.beta);
  const NegativeSampler negatives(g, hp.negative_distribution, hp.negatives);

  TrainResult result;
  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    WalkConfig walk = hp.walk;
    walk.seed = derive_seed(derive_seed(seed, kWalkStream), epoch);
    auto pairs = positive_pairs(sampler, walk, hp.workers);
    Rng rng(derive_seed(derive_seed(seed, kBatchStream), epoch));
    rng.shuffle(std::span(pairs));

    double weighted_loss = 0.0;
    std::size_t step = 0;
    for (std::size_t begin = 0; begin < pairs.size(); begin += hp.batch_size, ++step) {
      const auto end = std::min(pairs.size(), begin + hp.batch_size);
      PairBatch pb;
      pb.pairs.assign(pairs.begin() + static_cast<std::ptrdiff_t>(begin),
                      pairs.begin() + static_cast<std::ptrdiff_t>(end));
      for (const auto& p : pb.pairs) pb.negatives.push_back(negatives.draw(p.u, p.v, rng));
      const auto nodes = pb.nodes();
      const auto batch = build_layered_batch(sampler, nodes, hp.layer_sizes, rng, true);

      LossAndGradient lg;
      try {
        lg = batch_loss_and_gradient(pb, batch, features, params, hp);
      } catch (const DivergenceError& e) {
        throw DivergenceError("epoch " + std::to_string(epoch + 1) + " step " +
                              std::to_string(step + 1) + ": " + e.what());
      }
      if (!std::isfinite(lg.loss) || !lg.gradient.all_finite()) {
        throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch + 1) +
                              " step " + std::to_string(step + 1));
      }
      auto targets = params.tensors();
      const auto grads = lg.gradient.tensors();
      for (std::size_t i = 0; i < targets.size(); ++i) {
        *targets[i] -= hp.learning_rate * *grads[i];
      }
      weighted_loss += lg.loss * static_cast<double>(end - begin);
    }
    const double mean = pairs.empty() ? 0.0 : weighted_loss / static_cast<double>(pairs.size());
    result.log.epoch_loss.push_back(mean);
    result.log.epoch_pairs.push_back(pairs.size());
    if (on_epoch) on_epoch(epoch, mean);
  }
  result.params = std::move(params);
  return result;
}

Embeddings embed_all(const WeightedGraph& g, const FeatureMatrix& features,
                     const ModelParams& params, const Hyperparams& hp, std::uint64_t seed) {
  hp.check();
  check_features(g, features);
  const NeighborSampler sampler(g, hp.beta);
  const std::size_t n = g.node_count();
  Eigen::MatrixXd vectors(static_cast<Eigen::Index>(hp.out_dim), static_cast<Eigen::Index>(n));

  for (std::size_t begin = 0, chunk = 0; begin < n; begin += kEmbedChunkSize, ++chunk) {
    const auto end = std::min(n, begin + kEmbedChunkSize);
    std::vector<NodeId> nodes(end - begin);
    std::iota(nodes.begin(), nodes.end(), static_cast<NodeId>(begin));
    Rng rng(derive_seed(derive_seed(seed, kEmbedStream), chunk));
    const auto batch = build_layered_batch(sampler, nodes, hp.layer_sizes, rng, true);
    vectors.middleCols(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end - begin)) =
        forward(batch, features, params, hp);
  }
  return Embeddings(g.keys(), std::move(vectors));
}

}  // namespace swag
