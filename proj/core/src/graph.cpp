#include "swag/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "swag/error.hpp"
#include "swag/text.hpp"

namespace swag {

namespace {

std::string describe_row(const EdgeRecord& e, std::size_t position) {
  if (e.line != 0) return {};
  return "edge " + std::to_string(position + 1) + ": ";
}

std::size_t nearest_rank(const std::vector<std::size_t>& sorted, double q) {
  if (sorted.empty()) return 0;
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

}  // namespace

std::vector<Neighbor> WeightedGraph::neighbors(NodeId u) const {
  if (u >= node_count()) {
    throw IndexError("node " + std::to_string(u) + " out of range (node_count " +
                     std::to_string(node_count()) + ")");
  }
  std::vector<Neighbor> out;
  out.reserve(degree(u));
  const auto ids = neighbor_ids(u);
  const auto ws = neighbor_weights(u);
  for (std::size_t i = 0; i < ids.size(); ++i) out.push_back({ids[i], ws[i]});
  return out;
}

std::optional<double> WeightedGraph::weight(NodeId u, NodeId v) const {
  if (u >= node_count() || v >= node_count()) return std::nullopt;
  const auto ids = neighbor_ids(u);
  const auto it = std::lower_bound(ids.begin(), ids.end(), v);
  if (it == ids.end() || *it != v) return std::nullopt;
  return neighbor_weights(u)[static_cast<std::size_t>(it - ids.begin())];
}

bool WeightedGraph::has_edge(NodeId u, NodeId v) const { return weight(u, v).has_value(); }

std::optional<NodeId> WeightedGraph::find(std::string_view key) const {
  const auto it = index_.find(std::string(key));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WeightedGraph build_graph(std::span<const EdgeRecord> edges,
                          std::span<const std::string> extra_nodes) {
  // Canonical (lower key, higher key) -> weight.
  std::map<std::pair<std::string, std::string>, double> unique;
  std::vector<std::string> keys(extra_nodes.begin(), extra_nodes.end());
  std::size_t dropped = 0;

  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    const auto where = describe_row(e, i);
    if (!std::isfinite(e.weight)) {
      throw InputError(where + "weight is not finite", e.line);
    }
    if (e.weight < 0.0 || e.weight > 1.0) {
      throw InputError(where + "weight out of range (0,1]: " + format_double(e.weight), e.line);
    }
    if (e.src == e.dst) {
      throw InputError(where + "self-loop on '" + e.src + "'", e.line);
    }
    keys.push_back(e.src);
    keys.push_back(e.dst);
    if (e.weight == 0.0) {
      ++dropped;
      continue;
    }
    auto pair = e.src < e.dst ? std::pair{e.src, e.dst} : std::pair{e.dst, e.src};
    const auto [it, inserted] = unique.emplace(pair, e.weight);
    if (!inserted && it->second != e.weight) {
      throw InputError(where + "conflicting weights for pair (" + pair.first + ", " +
                           pair.second + "): " + format_double(it->second) + " vs " +
                           format_double(e.weight),
                       e.line);
    }
  }

  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  WeightedGraph g;
  g.keys_ = std::move(keys);
  g.index_.reserve(g.keys_.size());
  for (std::size_t i = 0; i < g.keys_.size(); ++i) {
    g.index_.emplace(g.keys_[i], static_cast<NodeId>(i));
  }

  const std::size_t n = g.keys_.size();
  std::vector<std::size_t> degree(n, 0);
  std::vector<std::array<NodeId, 2>> pairs;
  std::vector<double> pair_weights;
  pairs.reserve(unique.size());
  pair_weights.reserve(unique.size());
  for (const auto& [pair, w] : unique) {
    const NodeId a = g.index_.at(pair.first);
    const NodeId b = g.index_.at(pair.second);
    pairs.push_back({a, b});
    pair_weights.push_back(w);
    ++degree[a];
    ++degree[b];
  }

  g.offsets_.assign(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u) g.offsets_[u + 1] = g.offsets_[u] + degree[u];
  g.targets_.resize(g.offsets_[n]);
  g.weights_.resize(g.offsets_[n]);

  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [a, b] = pairs[i];
    g.targets_[cursor[a]] = b;
    g.weights_[cursor[a]++] = pair_weights[i];
    g.targets_[cursor[b]] = a;
    g.weights_[cursor[b]++] = pair_weights[i];
  }

  for (std::size_t u = 0; u < n; ++u) {
    const auto begin = g.offsets_[u];
    const auto end = g.offsets_[u + 1];
    std::vector<std::pair<NodeId, double>> row;
    row.reserve(end - begin);
    for (auto k = begin; k < end; ++k) row.emplace_back(g.targets_[k], g.weights_[k]);
    std::sort(row.begin(), row.end());
    for (auto k = begin; k < end; ++k) {
      g.targets_[k] = row[k - begin].first;
      g.weights_[k] = row[k - begin].second;
    }
  }

  g.dropped_zero_weight_ = dropped;
  return g;
}

GraphDiagnostics validate(const WeightedGraph& g) {
  GraphDiagnostics d;
  d.nodes = g.node_count();
  d.edges = g.edge_count();
  d.dropped_zero_weight = g.dropped_zero_weight();

  std::vector<std::size_t> degrees(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) {
    degrees[u] = g.degree(u);
    if (degrees[u] == 0) ++d.isolated;
    const auto ids = g.neighbor_ids(u);
    const auto ws = g.neighbor_weights(u);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] < u) continue;
      auto bin = static_cast<std::size_t>(std::ceil(ws[i] * 10.0)) - 1;
      d.weight_histogram[std::min<std::size_t>(bin, 9)]++;
    }
  }
  std::sort(degrees.begin(), degrees.end());
  d.degree_p50 = nearest_rank(degrees, 0.50);
  d.degree_p90 = nearest_rank(degrees, 0.90);
  d.degree_p99 = nearest_rank(degrees, 0.99);
  d.degree_max = degrees.empty() ? 0 : degrees.back();
  return d;
}

void write_diagnostics(std::ostream& out, const GraphDiagnostics& d) {
  out << "nodes=" << d.nodes << '\n'
      << "edges=" << d.edges << '\n'
      << "isolated=" << d.isolated << '\n'
      << "dropped_zero_weight=" << d.dropped_zero_weight << '\n';
  out << "weight_histogram=";
  for (std::size_t i = 0; i < d.weight_histogram.size(); ++i) {
    out << (i ? "," : "") << d.weight_histogram[i];
  }
  out << '\n'
      << "degree_p50=" << d.degree_p50 << '\n'
      << "degree_p90=" << d.degree_p90 << '\n'
      << "degree_p99=" << d.degree_p99 << '\n'
      << "degree_max=" << d.degree_max << '\n';
}

std::vector<EdgeRecord> read_edges(std::istream& in) {
  std::vector<EdgeRecord> edges;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (is_skippable(line)) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw InputError("expected 3 tab-separated fields, got " + std::to_string(fields.size()),
                       number);
    }
    const auto weight = parse_double(fields[2]);
    if (!weight) throw InputError("bad weight '" + std::string(fields[2]) + "'", number);
    edges.push_back({std::string(fields[0]), std::string(fields[1]), *weight, number});
  }
  return edges;
}

void write_edges(std::ostream& out, const WeightedGraph& g) {
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto ids = g.neighbor_ids(u);
    const auto ws = g.neighbor_weights(u);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] <= u) continue;
      out << g.key(u) << '\t' << g.key(ids[i]) << '\t' << format_double(ws[i]) << '\n';
    }
  }
}

void write_node_table(std::ostream& out, const WeightedGraph& g) {
  for (NodeId u = 0; u < g.node_count(); ++u) out << u << '\t' << g.key(u) << '\n';
}

}  // namespace swag
