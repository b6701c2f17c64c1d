#include "swag/aggregators.hpp"

#include <cmath>
#include <string>

#include "swag/error.hpp"
#include "swag/text.hpp"

namespace swag {

std::optional<Aggregator> parse_aggregator(std::string_view token) {
  token = trim(token);
  if (token == "mean") return Aggregator::mean;
  if (token == "gcn") return Aggregator::gcn;
  if (token == "max_pool" || token == "maxpool") return Aggregator::max_pool;
  if (token == "mean_pool" || token == "meanpool") return Aggregator::mean_pool;
  return std::nullopt;
}

std::string_view aggregator_name(Aggregator a) {
  switch (a) {
    case Aggregator::mean:
      return "mean";
    case Aggregator::gcn:
      return "gcn";
    case Aggregator::max_pool:
      return "max_pool";
    case Aggregator::mean_pool:
      return "mean_pool";
  }
  return "mean";
}

Eigen::VectorXd normalized(const Eigen::VectorXd& x) {
  const double n = x.norm();
  if (n == 0.0) return x;
  return x / n;
}

void normalize_columns(Eigen::MatrixXd& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double n = m.col(c).norm();
    if (n > 0.0) m.col(c) /= n;
  }
}

Eigen::VectorXd weight_multipliers(std::span<const double> weights, double gamma) {
  Eigen::VectorXd m(static_cast<Eigen::Index>(weights.size()));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    m[static_cast<Eigen::Index>(i)] = std::pow(weights[i], gamma);
  }
  return m;
}

namespace {

void check_aligned(const Eigen::MatrixXd& states, std::span<const double> weights) {
  if (static_cast<std::size_t>(states.cols()) != weights.size()) {
    throw ShapeError("aggregator got " + std::to_string(states.cols()) + " states but " +
                     std::to_string(weights.size()) + " weights");
  }
}

}  // namespace

namespace detail {

Eigen::VectorXd mean_of_scaled(const Eigen::Ref<const Eigen::MatrixXd>& block,
                               const Eigen::Ref<const Eigen::VectorXd>& multipliers) {
  return (block * multipliers) / static_cast<double>(block.cols());
}

Eigen::VectorXd pool_of_scaled(const Eigen::Ref<const Eigen::MatrixXd>& block,
                               const Eigen::Ref<const Eigen::VectorXd>& multipliers,
                               const Eigen::MatrixXd& pool, PoolKind kind, Eigen::MatrixXd& pre,
                               Eigen::VectorXi& argmax) {
  pre = pool * (block * multipliers.asDiagonal());
  const Eigen::MatrixXd activated = pre.cwiseMax(0.0);
  if (kind == PoolKind::mean) {
    argmax.resize(0);
    return activated.rowwise().mean();
  }
  Eigen::VectorXd out(activated.rows());
  argmax.resize(activated.rows());
  for (Eigen::Index r = 0; r < activated.rows(); ++r) {
    Eigen::Index best = 0;
    out[r] = activated.row(r).maxCoeff(&best);
    argmax[r] = static_cast<int>(best);
  }
  return out;
}

}  // namespace detail

Eigen::VectorXd aggregate_mean(const Eigen::MatrixXd& states, std::span<const double> weights,
                               double gamma) {
  check_aligned(states, weights);
  if (states.cols() == 0) return Eigen::VectorXd::Zero(states.rows());
  return normalized(detail::mean_of_scaled(states, weight_multipliers(weights, gamma)));
}

Eigen::VectorXd aggregate_pool(const Eigen::MatrixXd& states, std::span<const double> weights,
                               double gamma, PoolKind kind, const Eigen::MatrixXd& pool) {
  check_aligned(states, weights);
  if (pool.cols() != states.rows()) {
    throw ShapeError("pool matrix expects width " + std::to_string(pool.cols()) + ", got " +
                     std::to_string(states.rows()));
  }
  if (states.cols() == 0) return Eigen::VectorXd::Zero(pool.rows());
  Eigen::MatrixXd pre;
  Eigen::VectorXi argmax;
  return normalized(
      detail::pool_of_scaled(states, weight_multipliers(weights, gamma), pool, kind, pre, argmax));
}

Eigen::VectorXd aggregate_gcn(const Eigen::VectorXd& self, const Eigen::MatrixXd& states,
                              std::span<const double> weights, double gamma) {
  check_aligned(states, weights);
  if (states.cols() > 0 && states.rows() != self.size()) {
    throw ShapeError("gcn aggregator: self and neighbor widths differ");
  }
  Eigen::VectorXd sum = self;
  if (states.cols() > 0) sum += states * weight_multipliers(weights, gamma);
  return normalized(sum / static_cast<double>(states.cols() + 1));
}

Eigen::VectorXd fuse_features(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                              const Eigen::MatrixXd& w0) {
  if (w0.rows() != x1.size() || w0.cols() != x2.size()) {
    throw ShapeError("fusion matrix is " + std::to_string(w0.rows()) + "x" +
                     std::to_string(w0.cols()) + ", inputs are " + std::to_string(x1.size()) +
                     " and " + std::to_string(x2.size()));
  }
  return (x1 + w0 * x2).cwiseMax(0.0);
}

}  // namespace swag
