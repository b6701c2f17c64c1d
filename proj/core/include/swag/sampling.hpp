#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "swag/graph.hpp"
#include "swag/rng.hpp"

namespace swag {

// Draws neighbors of a node with probability proportional to s(u, v)^beta.
//
// Holds per-edge cumulative masses aligned with the graph's CSR layout, so a
// draw is one uniform variate and a binary search. The graph must outlive
// the sampler.
class NeighborSampler {
 public:
  NeighborSampler(const WeightedGraph& g, double beta);

  const WeightedGraph& graph() const { return *graph_; }
  double beta() const { return beta_; }

  // One draw. Throws SamplingError when u has no neighbors.
  Neighbor draw(NodeId u, Rng& rng) const;

  // `size` independent draws with replacement.
  std::vector<Neighbor> sample(NodeId u, std::size_t size, Rng& rng) const;

  // Probability of the i-th adjacency entry of u.
  double probability(NodeId u, std::size_t i) const;

 private:
  const WeightedGraph* graph_;
  double beta_;
  std::vector<double> cumulative_;
};

std::vector<Neighbor> sample_neighbors(const WeightedGraph& g, NodeId u, std::size_t size,
                                       double beta, Rng& rng);

struct SamplerConfig {
  double beta = 0.0;
  std::vector<std::size_t> layer_sizes{25, 10};
  std::uint64_t seed = 0;

  void check() const;
};

// Fixed fan-out neighborhoods for a minibatch of target nodes.
//
// hops[0] holds the targets; hops[k] holds S_k sampled neighbors for each
// entry of hops[k-1], stored parent-major, so the children of entry p of
// hops[k-1] are hops[k][p*S_k .. p*S_k + S_k). weights[k-1] is aligned with
// hops[k] and stores s(parent, child).
struct LayeredBatch {
  std::vector<std::size_t> fanout;
  std::vector<std::vector<NodeId>> hops;
  std::vector<std::vector<double>> weights;
  // fallback[k-1][p] is true when entry p of hops[k-1] had no neighbors and
  // its children are copies of itself with weight 1.
  std::vector<std::vector<bool>> fallback;

  std::size_t depth() const { return fanout.size(); }
  const std::vector<NodeId>& targets() const { return hops.front(); }
};

// Samples layer by layer: S_1 neighbors of each target, then S_2 of each
// layer-1 entry, and so on. Draw order is hop-major, then parent, then slot.
// With `self_fallback`, an isolated node is given copies of itself with
// weight 1; otherwise an isolated node raises SamplingError.
LayeredBatch build_layered_batch(const NeighborSampler& sampler, std::span<const NodeId> targets,
                                 std::span<const std::size_t> layer_sizes, Rng& rng,
                                 bool self_fallback = false);

struct WalkConfig {
  std::size_t walk_length = 5;
  std::size_t walks_per_node = 10;
  std::size_t window = 2;
  std::uint64_t seed = 0;

  void check() const;
};

// A walk of n nodes records the n-1 traversed edge weights.
struct Walk {
  std::vector<NodeId> nodes;
  std::vector<double> weights;
};

// Transitions use the sampler's law, s(x, .)^beta. Stops early only if it
// reaches an isolated node, which cannot happen after the first step.
Walk random_walk(const NeighborSampler& sampler, NodeId start, std::size_t length, Rng& rng);

// Geometric mean (prod w_i)^(1/n). Throws InputError on an empty sequence.
double path_weight_geomean(std::span<const double> weights);

struct TrainingPair {
  NodeId u = 0;
  NodeId v = 0;
  double r = 1.0;
};

// Emits (node_i, node_{i+d}) for d = 1..window along the walk, with r the
// geometric mean of the d traversed weights. Pairs with u == v are skipped.
void append_walk_pairs(const Walk& walk, std::size_t window, std::vector<TrainingPair>& out);

// walks_per_node walks from every non-isolated node. Nodes are processed in
// fixed shards of `kWalkShardSize`, each with its own stream derived from
// (cfg.seed, shard index); the result is independent of `workers`.
inline constexpr std::size_t kWalkShardSize = 64;
std::vector<Walk> generate_walks(const NeighborSampler& sampler, const WalkConfig& cfg,
                                 std::size_t workers = 1);

std::vector<TrainingPair> positive_pairs(const NeighborSampler& sampler, const WalkConfig& cfg,
                                         std::size_t workers = 1);

enum class NegativeDistribution { uniform, degree075 };
std::optional<NegativeDistribution> parse_negative_distribution(std::string_view token);

// Fixed negative distribution over all nodes: uniform, or proportional to
// degree^0.75.
class NegativeSampler {
 public:
  NegativeSampler(const WeightedGraph& g, NegativeDistribution dist, std::size_t q);

  std::size_t q() const { return q_; }
  const std::vector<double>& probabilities() const { return probabilities_; }

  // Q draws from the distribution, rejecting u, v and the neighbors of u.
  // Throws SamplingError after 100*Q rejected attempts.
  std::vector<NodeId> draw(NodeId u, NodeId v, Rng& rng) const;

 private:
  const WeightedGraph* graph_;
  std::size_t q_;
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
};

}  // namespace swag
