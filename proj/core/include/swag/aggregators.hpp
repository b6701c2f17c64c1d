#pragma once

#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

namespace swag {

// Neighborhood aggregators. Every aggregator scales neighbor state h_u by
// s(u, v)^gamma before combining, and L2-normalizes its output.
enum class Aggregator { mean, gcn, max_pool, mean_pool };

std::optional<Aggregator> parse_aggregator(std::string_view token);
std::string_view aggregator_name(Aggregator a);
inline bool is_pool(Aggregator a) { return a == Aggregator::max_pool || a == Aggregator::mean_pool; }

enum class PoolKind { max, mean };

// x / |x|, or x unchanged when |x| == 0.
Eigen::VectorXd normalized(const Eigen::VectorXd& x);
void normalize_columns(Eigen::MatrixXd& m);

// s^gamma for each weight. gamma == 0 gives exactly 1.
Eigen::VectorXd weight_multipliers(std::span<const double> weights, double gamma);

// `states` holds one neighbor state per column; `weights` is aligned with
// the columns.
Eigen::VectorXd aggregate_mean(const Eigen::MatrixXd& states, std::span<const double> weights,
                               double gamma);

// Each scaled state goes through ReLU(pool * (s^gamma h_u)), then an
// elementwise max or mean across neighbors.
Eigen::VectorXd aggregate_pool(const Eigen::MatrixXd& states, std::span<const double> weights,
                               double gamma, PoolKind kind, const Eigen::MatrixXd& pool);

// Inclusive mean of the node's own state and its scaled neighbor states.
// With no neighbors this is the normalized self state.
Eigen::VectorXd aggregate_gcn(const Eigen::VectorXd& self, const Eigen::MatrixXd& states,
                              std::span<const double> weights, double gamma);

// x = ReLU(x1 + w0 * x2). Throws ShapeError on mismatched dimensions.
Eigen::VectorXd fuse_features(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                              const Eigen::MatrixXd& w0);

namespace detail {

// Unnormalized aggregates over a block of neighbor columns.
Eigen::VectorXd mean_of_scaled(const Eigen::Ref<const Eigen::MatrixXd>& block,
                               const Eigen::Ref<const Eigen::VectorXd>& multipliers);

// Writes ReLU pre-activations into `pre` (d x S) and returns the pooled
// vector; for max pooling `argmax` receives the winning column per row.
Eigen::VectorXd pool_of_scaled(const Eigen::Ref<const Eigen::MatrixXd>& block,
                               const Eigen::Ref<const Eigen::VectorXd>& multipliers,
                               const Eigen::MatrixXd& pool, PoolKind kind, Eigen::MatrixXd& pre,
                               Eigen::VectorXi& argmax);

}  // namespace detail

}  // namespace swag
