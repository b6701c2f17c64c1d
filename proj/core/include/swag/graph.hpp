#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace swag {

using NodeId = std::uint32_t;

// One input row of an edge list. `line` is the 1-based source line, or 0
// for edges constructed in memory.
struct EdgeRecord {
  std::string src;
  std::string dst;
  double weight = 0.0;
  std::size_t line = 0;
};

struct Neighbor {
  NodeId id = 0;
  double weight = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Immutable undirected weighted graph in compressed sparse row form.
//
// Every undirected edge {u, v} is stored twice, once in each adjacency list,
// with the same weight. Neighbor lists are sorted by dense id. Dense ids are
// assigned in lexicographic order of the external keys, so the layout does
// not depend on the order of the input rows.
class WeightedGraph {
 public:
  WeightedGraph() : offsets_(1, 0) {}

  std::size_t node_count() const { return keys_.size(); }
  // Number of undirected edges (half the directed adjacency entries).
  std::size_t edge_count() const { return targets_.size() / 2; }
  std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }

  // Position of u's first adjacency entry; per-edge side arrays built by
  // other modules are aligned with this layout.
  std::size_t offset(NodeId u) const { return offsets_[u]; }
  std::size_t directed_entry_count() const { return targets_.size(); }

  std::span<const NodeId> neighbor_ids(NodeId u) const {
    return {targets_.data() + offsets_[u], degree(u)};
  }
  std::span<const double> neighbor_weights(NodeId u) const {
    return {weights_.data() + offsets_[u], degree(u)};
  }

  // Checked accessor; throws IndexError when u is out of range.
  std::vector<Neighbor> neighbors(NodeId u) const;

  bool has_edge(NodeId u, NodeId v) const;
  std::optional<double> weight(NodeId u, NodeId v) const;

  const std::string& key(NodeId u) const { return keys_[u]; }
  const std::vector<std::string>& keys() const { return keys_; }
  std::optional<NodeId> find(std::string_view key) const;

  // Rows with weight exactly 0 that were discarded at build time.
  std::size_t dropped_zero_weight() const { return dropped_zero_weight_; }

  friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return a.offsets_ == b.offsets_ && a.targets_ == b.targets_ &&
           a.weights_ == b.weights_ && a.keys_ == b.keys_;
  }

 private:
  friend WeightedGraph build_graph(std::span<const EdgeRecord>,
                                   std::span<const std::string>);

  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::vector<double> weights_;
  std::vector<std::string> keys_;
  std::unordered_map<std::string, NodeId> index_;
  std::size_t dropped_zero_weight_ = 0;
};

// Builds a symmetric, deduplicated graph. Rows (a, b, w) and (b, a, w) are
// the same edge; a missing reverse row is synthesized. `extra_nodes` adds
// keys that may have no edges (isolated nodes).
//
// Throws InputError for a non-finite weight, a weight outside [0, 1], a
// self-loop, or two rows of the same pair with different weights. Rows with
// weight 0 are dropped and counted; their endpoints are kept as nodes.
WeightedGraph build_graph(std::span<const EdgeRecord> edges,
                          std::span<const std::string> extra_nodes = {});

struct GraphDiagnostics {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t isolated = 0;
  std::size_t dropped_zero_weight = 0;
  // Bin i counts weights in (i/10, (i+1)/10].
  std::array<std::size_t, 10> weight_histogram{};
  // Nearest-rank degree percentiles over all nodes.
  std::size_t degree_p50 = 0;
  std::size_t degree_p90 = 0;
  std::size_t degree_p99 = 0;
  std::size_t degree_max = 0;
};

GraphDiagnostics validate(const WeightedGraph& g);

// key=value lines, one per field.
void write_diagnostics(std::ostream& out, const GraphDiagnostics& d);

// Edge TSV: `src<TAB>dst<TAB>weight`, '#' lines and blank lines ignored.
std::vector<EdgeRecord> read_edges(std::istream& in);
// Writes each undirected edge once, as (lower id, higher id).
void write_edges(std::ostream& out, const WeightedGraph& g);
// Node table: `id<TAB>external_key`.
void write_node_table(std::ostream& out, const WeightedGraph& g);

}  // namespace swag
