#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "swag/graph.hpp"
#include "swag/model.hpp"

namespace swag {

// Unit-norm output vectors keyed by external item key, one column each.
class Embeddings {
 public:
  Embeddings() = default;
  Embeddings(std::vector<std::string> keys, Eigen::MatrixXd vectors);

  std::size_t size() const { return keys_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(vectors_.rows()); }
  const std::vector<std::string>& keys() const { return keys_; }
  const std::string& key(NodeId i) const { return keys_[i]; }
  const Eigen::MatrixXd& vectors() const { return vectors_; }
  auto vector(NodeId i) const { return vectors_.col(i); }
  std::optional<NodeId> find(std::string_view key) const;

 private:
  std::vector<std::string> keys_;
  Eigen::MatrixXd vectors_;
  std::unordered_map<std::string, NodeId> index_;
};

// Stream tags under the run seed. Epoch e of training walks from
// derive_seed(derive_seed(seed, kWalkStream), e); embedding chunk c samples
// from derive_seed(derive_seed(seed, kEmbedStream), c).
inline constexpr std::uint64_t kInitStream = 1;
inline constexpr std::uint64_t kWalkStream = 2;
inline constexpr std::uint64_t kBatchStream = 3;
inline constexpr std::uint64_t kEmbedStream = 4;

struct TrainingLog {
  std::vector<double> epoch_loss;  // mean pair loss per epoch
  std::vector<std::size_t> epoch_pairs;
};

struct TrainResult {
  ModelParams params;
  TrainingLog log;
};

// Called after every epoch with (epoch index, mean loss).
using EpochCallback = std::function<void(std::size_t, double)>;

// Minibatch SGD over random-walk positive pairs with negative sampling.
// Deterministic given `seed`. Throws DivergenceError naming the epoch and
// step when the loss or a gradient turns non-finite.
TrainResult train(const WeightedGraph& g, const FeatureMatrix& features, const Hyperparams& hp,
                  std::uint64_t seed, const EpochCallback& on_epoch = {});

// Same, starting from the given parameters.
TrainResult train_from(const WeightedGraph& g, const FeatureMatrix& features,
                       const Hyperparams& hp, ModelParams params, std::uint64_t seed,
                       const EpochCallback& on_epoch = {});

ModelParams initial_params(const FeatureMatrix& features, const Hyperparams& hp,
                           std::uint64_t seed);

// Inference over every node, isolated nodes included (they aggregate their
// own state). Nodes are processed in fixed chunks with per-chunk streams.
inline constexpr std::size_t kEmbedChunkSize = 256;
Embeddings embed_all(const WeightedGraph& g, const FeatureMatrix& features,
                     const ModelParams& params, const Hyperparams& hp, std::uint64_t seed);

}  // namespace swag
