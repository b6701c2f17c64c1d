#include "swag/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "swag/error.hpp"
#include "swag/text.hpp"

namespace swag {

namespace {

// Index of the first cumulative mass exceeding u * total.
std::size_t pick(std::span<const double> cumulative, double u) {
  const double target = u * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                               cumulative.size() - 1);
}

}  // namespace

NeighborSampler::NeighborSampler(const WeightedGraph& g, double beta)
    : graph_(&g), beta_(beta), cumulative_(g.directed_entry_count()) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be finite and >= 0");
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto ws = g.neighbor_weights(u);
    double total = 0.0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      total += std::pow(ws[i], beta);
      cumulative_[g.offset(u) + i] = total;
    }
  }
}

Neighbor NeighborSampler::draw(NodeId u, Rng& rng) const {
  if (u >= graph_->node_count()) throw IndexError("node " + std::to_string(u) + " out of range");
  const auto d = graph_->degree(u);
  if (d == 0) throw SamplingError("no neighbors to sample for node '" + graph_->key(u) + "'");
  const std::span<const double> cumulative(cumulative_.data() + graph_->offset(u), d);
  const auto i = pick(cumulative, rng.uniform());
  return {graph_->neighbor_ids(u)[i], graph_->neighbor_weights(u)[i]};
}

std::vector<Neighbor> NeighborSampler::sample(NodeId u, std::size_t size, Rng& rng) const {
  std::vector<Neighbor> out;
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i) out.push_back(draw(u, rng));
  return out;
}

double NeighborSampler::probability(NodeId u, std::size_t i) const {
  const auto base = graph_->offset(u);
  const double total = cumulative_[base + graph_->degree(u) - 1];
  const double below = i == 0 ? 0.0 : cumulative_[base + i - 1];
  return (cumulative_[base + i] - below) / total;
}

std::vector<Neighbor> sample_neighbors(const WeightedGraph& g, NodeId u, std::size_t size,
                                       double beta, Rng& rng) {
  return NeighborSampler(g, beta).sample(u, size, rng);
}

void SamplerConfig::check() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be finite and >= 0");
  if (layer_sizes.empty()) throw ConfigError("layer_sizes must name at least one layer");
  for (const auto s : layer_sizes) {
    if (s == 0) throw ConfigError("every layer size must be >= 1");
  }
}

LayeredBatch build_layered_batch(const NeighborSampler& sampler, std::span<const NodeId> targets,
                                 std::span<const std::size_t> layer_sizes, Rng& rng,
                                 bool self_fallback) {
  const auto& g = sampler.graph();
  LayeredBatch batch;
  batch.fanout.assign(layer_sizes.begin(), layer_sizes.end());
  batch.hops.emplace_back(targets.begin(), targets.end());
  for (const auto t : batch.hops.front()) {
    if (t >= g.node_count()) throw IndexError("target node " + std::to_string(t) + " out of range");
  }

  for (std::size_t k = 0; k < batch.fanout.size(); ++k) {
    const auto fan = batch.fanout[k];
    if (fan == 0) throw ConfigError("every layer size must be >= 1");
    const auto& parents = batch.hops[k];
    std::vector<NodeId> children;
    std::vector<double> weights;
    std::vector<bool> fallback(parents.size(), false);
    children.reserve(parents.size() * fan);
    weights.reserve(parents.size() * fan);
    for (std::size_t p = 0; p < parents.size(); ++p) {
      const auto u = parents[p];
      if (g.degree(u) == 0 && self_fallback) {
        fallback[p] = true;
        children.insert(children.end(), fan, u);
        weights.insert(weights.end(), fan, 1.0);
        continue;
      }
      for (std::size_t s = 0; s < fan; ++s) {
        const auto n = sampler.draw(u, rng);
        children.push_back(n.id);
        weights.push_back(n.weight);
      }
    }
    batch.hops.push_back(std::move(children));
    batch.weights.push_back(std::move(weights));
    batch.fallback.push_back(std::move(fallback));
  }
  return batch;
}

void WalkConfig::check() const {
  if (walk_length < 2) throw ConfigError("walk_length must be >= 2");
  if (window < 1) throw ConfigError("window must be >= 1");
}

Walk random_walk(const NeighborSampler& sampler, NodeId start, std::size_t length, Rng& rng) {
  const auto& g = sampler.graph();
  if (start >= g.node_count()) throw IndexError("walk start out of range");
  if (g.degree(start) == 0) {
    throw SamplingError("no neighbors to sample for node '" + g.key(start) + "'");
  }
  Walk walk;
  walk.nodes.reserve(length);
  walk.weights.reserve(length > 0 ? length - 1 : 0);
  if (length == 0) return walk;
  walk.nodes.push_back(start);
  while (walk.nodes.size() < length) {
    const auto here = walk.nodes.back();
    if (g.degree(here) == 0) break;
    const auto next = sampler.draw(here, rng);
    walk.nodes.push_back(next.id);
    walk.weights.push_back(next.weight);
  }
  return walk;
}

double path_weight_geomean(std::span<const double> weights) {
  if (weights.empty()) throw InputError("geometric mean of an empty path");
  double log_sum = 0.0;
  for (const auto w : weights) log_sum += std::log(w);
  return std::exp(log_sum / static_cast<double>(weights.size()));
}

void append_walk_pairs(const Walk& walk, std::size_t window, std::vector<TrainingPair>& out) {
  const auto n = walk.nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 1; d <= window && i + d < n; ++d) {
      const auto u = walk.nodes[i];
      const auto v = walk.nodes[i + d];
      if (u == v) continue;
      const std::span<const double> segment(walk.weights.data() + i, d);
      out.push_back({u, v, path_weight_geomean(segment)});
    }
  }
}

std::vector<Walk> generate_walks(const NeighborSampler& sampler, const WalkConfig& cfg,
                                 std::size_t workers) {
  cfg.check();
  const auto& g = sampler.graph();
  const std::size_t n = g.node_count();
  const std::size_t shards = (n + kWalkShardSize - 1) / kWalkShardSize;
  std::vector<std::vector<Walk>> per_shard(shards);

  auto run_shard = [&](std::size_t shard) {
    Rng rng(derive_seed(cfg.seed, shard));
    const auto begin = shard * kWalkShardSize;
    const auto end = std::min(n, begin + kWalkShardSize);
    auto& walks = per_shard[shard];
    for (auto u = static_cast<NodeId>(begin); u < end; ++u) {
      if (g.degree(u) == 0) continue;
      for (std::size_t w = 0; w < cfg.walks_per_node; ++w) {
        walks.push_back(random_walk(sampler, u, cfg.walk_length, rng));
      }
    }
  };

  workers = std::max<std::size_t>(1, std::min(workers, shards));
  if (workers == 1) {
    for (std::size_t s = 0; s < shards; ++s) run_shard(s);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t s = w; s < shards; s += workers) run_shard(s);
      });
    }
  }

  std::vector<Walk> walks;
  for (auto& shard : per_shard) {
    for (auto& walk : shard) walks.push_back(std::move(walk));
  }
  return walks;
}

std::vector<TrainingPair> positive_pairs(const NeighborSampler& sampler, const WalkConfig& cfg,
                                         std::size_t workers) {
  std::vector<TrainingPair> pairs;
  for (const auto& walk : generate_walks(sampler, cfg, workers)) {
    append_walk_pairs(walk, cfg.window, pairs);
  }
  return pairs;
}

std::optional<NegativeDistribution> parse_negative_distribution(std::string_view token) {
  token = trim(token);
  if (token == "uniform") return NegativeDistribution::uniform;
  if (token == "degree075") return NegativeDistribution::degree075;
  return std::nullopt;
}

NegativeSampler::NegativeSampler(const WeightedGraph& g, NegativeDistribution dist,
                                 std::size_t q)
    : graph_(&g), q_(q), probabilities_(g.node_count()), cumulative_(g.node_count()) {
  double total = 0.0;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const double mass = dist == NegativeDistribution::uniform
                            ? 1.0
                            : std::pow(static_cast<double>(g.degree(u)), 0.75);
    probabilities_[u] = mass;
    total += mass;
    cumulative_[u] = total;
  }
  if (g.node_count() > 0 && total > 0.0) {
    for (auto& p : probabilities_) p /= total;
  }
}

std::vector<NodeId> NegativeSampler::draw(NodeId u, NodeId v, Rng& rng) const {
  std::vector<NodeId> out;
  if (q_ == 0) return out;
  if (cumulative_.empty() || !(cumulative_.back() > 0.0)) {
    throw SamplingError("negative sampling exhausted: empty distribution");
  }
  out.reserve(q_);
  const auto neighbors = graph_->neighbor_ids(u);
  const std::size_t budget = 100 * q_;
  std::size_t attempts = 0;
  while (out.size() < q_) {
    if (attempts++ >= budget) {
      throw SamplingError("negative sampling exhausted after " + std::to_string(budget) +
                          " attempts");
    }
    const auto c = static_cast<NodeId>(pick(cumulative_, rng.uniform()));
    if (c == u || c == v || std::binary_search(neighbors.begin(), neighbors.end(), c)) continue;
    out.push_back(c);
  }
  return out;
}

}  // namespace swag
