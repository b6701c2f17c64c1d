#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swag/graph.hpp"
#include "swag/model.hpp"
#include "swag/rng.hpp"

namespace fixtures {

std::string key(std::size_t i);  // "n000", "n001", ...

// A ring over `nodes` nodes plus random chords up to `edges` undirected
// edges, with weights uniform in (0, 1]. Every node has degree >= 2.
std::vector<swag::EdgeRecord> random_edges(std::size_t nodes, std::size_t edges,
                                           std::uint64_t seed);

// Same topology, every weight replaced by `w`.
std::vector<swag::EdgeRecord> with_weight(std::vector<swag::EdgeRecord> edges, double w);

// Columns are i.i.d. standard normal-ish (sum of uniforms), one per node.
Eigen::MatrixXd random_features(std::size_t dim, std::size_t nodes, std::uint64_t seed);

// Two clusters of `half` nodes. Inside a cluster each node links to its
// `intra_degree` nearest ring successors with weight 0.9; `bridges` random
// cross-cluster edges have weight 0.1. Block of node i: i < half ? 0 : 1
// (keys sort in id order).
struct TwoBlock {
  std::vector<swag::EdgeRecord> edges;
  Eigen::MatrixXd features;  // dim x 2*half
  std::size_t half = 0;
  int block(std::size_t i) const { return i < half ? 0 : 1; }
};
TwoBlock two_block(std::size_t half, std::size_t intra_degree, std::size_t bridges,
                   std::size_t dim, double feature_signal, std::uint64_t seed);

// Mean cosine over intra-block and inter-block pairs of unit columns.
struct Margin {
  double intra = 0.0;
  double inter = 0.0;
  double margin() const { return intra - inter; }
};
Margin block_margin(const Eigen::MatrixXd& unit_columns, const TwoBlock& tb);

// Central differences of f around every entry of every parameter tensor.
template <typename F>
swag::ModelParams numeric_gradient(const swag::ModelParams& params, double step, F&& f) {
  swag::ModelParams grad = params.zeros_like();
  swag::ModelParams probe = params;
  auto targets = probe.tensors();
  auto outs = grad.tensors();
  for (std::size_t t = 0; t < targets.size(); ++t) {
    for (Eigen::Index i = 0; i < targets[t]->size(); ++i) {
      double& x = targets[t]->data()[i];
      const double saved = x;
      x = saved + step;
      const double up = f(probe);
      x = saved - step;
      const double down = f(probe);
      x = saved;
      outs[t]->data()[i] = (up - down) / (2.0 * step);
    }
  }
  return grad;
}

// max over tensors of |a - n| / max(|a|, |n|) in Frobenius norm; tensors
// with both norms below `floor` count as matching.
double max_relative_error(const swag::ModelParams& analytic, const swag::ModelParams& numeric,
                          double floor = 1e-10);

// Writes sessions.tsv, features.tsv (dim 8) and test.tsv into `dir`. Items
// fall into four groups; sessions mostly stay inside one group and test
// records ask for items of the seed's group.
void write_dataset(const std::filesystem::path& dir, std::size_t items, std::size_t sessions,
                   std::uint64_t seed);

// A fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

std::string read_file(const std::filesystem::path& path);

}  // namespace fixtures
