#include "swag/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swag/error.hpp"

namespace swag {

namespace {

Eigen::MatrixXd gather(const Eigen::MatrixXd& source, const std::vector<NodeId>& nodes) {
  Eigen::MatrixXd out(source.rows(), static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = source.col(nodes[i]);
  }
  return out;
}

Eigen::MatrixXd normalized_columns(Eigen::MatrixXd m) {
  normalize_columns(m);
  return m;
}

// Gradient of x -> x / |x| per column, given the normalized output y.
Eigen::MatrixXd normalize_backward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                   const Eigen::MatrixXd& dy) {
  Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double n = x.col(c).norm();
    if (n == 0.0) continue;
    dx.col(c) = (dy.col(c) - y.col(c) * y.col(c).dot(dy.col(c))) / n;
  }
  return dx;
}

Eigen::MatrixXd relu_mask(const Eigen::MatrixXd& pre) {
  return (pre.array() > 0.0).cast<double>().matrix();
}

PoolKind pool_kind(Aggregator a) {
  return a == Aggregator::max_pool ? PoolKind::max : PoolKind::mean;
}

double clamped_log_sigmoid(double x, double& derivative) {
  constexpr double lo = 1e-12;
  constexpr double hi = 1.0 - 1e-12;
  const double s = sigmoid(x);
  if (s < lo) {
    derivative = 0.0;
    return std::log(lo);
  }
  if (s > hi) {
    derivative = 0.0;
    return std::log(hi);
  }
  derivative = 1.0 - s;
  return std::log(s);
}

}  // namespace

std::size_t Hyperparams::layer_width(std::size_t k) const {
  return k == depth() ? out_dim : hidden_dims.at(k - 1);
}

void Hyperparams::check() const {
  for (const double e : {alpha, beta, gamma}) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw ConfigError("alpha, beta, gamma must be >= 0");
  }
  if (depth() == 0) throw ConfigError("model depth must be >= 1");
  for (const auto s : layer_sizes) {
    if (s == 0) throw ConfigError("every layer size must be >= 1");
  }
  if (hidden_dims.size() + 1 < depth()) {
    throw ConfigError("hidden_dims needs " + std::to_string(depth() - 1) + " entries");
  }
  for (std::size_t k = 1; k <= depth(); ++k) {
    if (layer_width(k) == 0) throw ConfigError("layer widths must be >= 1");
  }
  if (aggregators.size() != depth()) {
    throw ConfigError("aggregators needs " + std::to_string(depth()) + " entries");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  walk.check();
}

std::vector<Eigen::MatrixXd*> ModelParams::tensors() {
  std::vector<Eigen::MatrixXd*> out;
  for (auto& m : layers) out.push_back(&m);
  for (auto& m : pools) out.push_back(&m);
  out.push_back(&fusion);
  return out;
}

std::vector<const Eigen::MatrixXd*> ModelParams::tensors() const {
  std::vector<const Eigen::MatrixXd*> out;
  for (const auto& m : layers) out.push_back(&m);
  for (const auto& m : pools) out.push_back(&m);
  out.push_back(&fusion);
  return out;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  for (auto* m : z.tensors()) m->setZero();
  return z;
}

bool ModelParams::all_finite() const {
  for (const auto* m : tensors()) {
    if (!m->allFinite()) return false;
  }
  return true;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto* m : tensors()) n += static_cast<std::size_t>(m->size());
  return n;
}

bool operator==(const ModelParams& a, const ModelParams& b) {
  const auto ta = a.tensors();
  const auto tb = b.tensors();
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i]->rows() != tb[i]->rows() || ta[i]->cols() != tb[i]->cols()) return false;
    if (*ta[i] != *tb[i]) return false;
  }
  return true;
}

ModelParams init_params(const Hyperparams& hp, std::size_t input_dim, std::size_t secondary_dim,
                        Rng& rng) {
  hp.check();
  auto uniform_matrix = [&rng](std::size_t rows, std::size_t cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    // Row-major fill keeps the draw order independent of storage order.
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-bound, bound);
    }
    return m;
  };

  ModelParams p;
  std::size_t width = input_dim;
  for (std::size_t k = 1; k <= hp.depth(); ++k) {
    const auto agg = hp.aggregators[k - 1];
    const auto out = hp.layer_width(k);
    p.layers.push_back(uniform_matrix(out, agg == Aggregator::gcn ? width : 2 * width));
    p.pools.push_back(is_pool(agg) ? uniform_matrix(width, width) : Eigen::MatrixXd());
    width = out;
  }
  if (secondary_dim > 0) p.fusion = uniform_matrix(input_dim, secondary_dim);
  return p;
}

ForwardTrace forward_trace(const LayeredBatch& batch, const FeatureMatrix& features,
                           const ModelParams& params, const Hyperparams& hp) {
  const std::size_t K = hp.depth();
  if (batch.depth() != K || params.layers.size() != K || params.pools.size() != K) {
    throw ShapeError("batch depth, parameter depth and model depth disagree");
  }
  if (features.fused() && (params.fusion.rows() != features.primary.rows() ||
                           params.fusion.cols() != features.secondary->rows())) {
    throw ShapeError("fusion matrix does not match the feature widths");
  }

  ForwardTrace t;
  t.states.resize(K + 1);
  t.inputs.resize(K + 1);
  t.fusion_pre.resize(K + 1);
  for (std::size_t j = 0; j <= K; ++j) {
    for (const auto v : batch.hops[j]) {
      if (v >= features.nodes()) throw ShapeError("node " + std::to_string(v) + " has no features");
    }
    Eigen::MatrixXd x = gather(features.primary, batch.hops[j]);
    if (features.fused()) {
      t.fusion_pre[j] = x + params.fusion * gather(*features.secondary, batch.hops[j]);
      x = t.fusion_pre[j].cwiseMax(0.0);
    }
    t.states[0].push_back(normalized_columns(x));
    t.inputs[j] = std::move(x);
  }
  for (std::size_t j = 0; j < K; ++j) {
    t.multipliers.push_back(weight_multipliers(batch.weights[j], hp.gamma));
  }

  t.layers.resize(K);
  for (std::size_t k = 1; k <= K; ++k) {
    const auto agg = hp.aggregators[k - 1];
    const auto& W = params.layers[k - 1];
    auto& L = t.layers[k - 1];
    for (std::size_t j = 0; j + k <= K; ++j) {
      const auto& self = t.states[k - 1][j];
      const auto& children = t.states[k - 1][j + 1];
      const auto S = static_cast<Eigen::Index>(batch.fanout[j]);
      const auto& m = t.multipliers[j];
      const Eigen::Index n = self.cols();
      const Eigen::Index d = self.rows();

      Eigen::MatrixXd A(is_pool(agg) ? params.pools[k - 1].rows() : d, n);
      Eigen::MatrixXd pool_pre;
      Eigen::MatrixXi argmax;
      if (is_pool(agg)) {
        pool_pre.resize(params.pools[k - 1].rows(), n * S);
        if (agg == Aggregator::max_pool) argmax.resize(params.pools[k - 1].rows(), n);
      }
      for (Eigen::Index p = 0; p < n; ++p) {
        const auto block = children.middleCols(p * S, S);
        const auto mult = m.segment(p * S, S);
        switch (agg) {
          case Aggregator::mean:
            A.col(p) = detail::mean_of_scaled(block, mult);
            break;
          case Aggregator::gcn:
            A.col(p) = (self.col(p) + block * mult) / static_cast<double>(S + 1);
            break;
          case Aggregator::max_pool:
          case Aggregator::mean_pool: {
            Eigen::MatrixXd pre;
            Eigen::VectorXi winners;
            A.col(p) = detail::pool_of_scaled(block, mult, params.pools[k - 1], pool_kind(agg),
                                              pre, winners);
            pool_pre.middleCols(p * S, S) = pre;
            if (agg == Aggregator::max_pool) argmax.col(p) = winners;
            break;
          }
        }
      }
      Eigen::MatrixXd N = normalized_columns(A);

      Eigen::MatrixXd pre;
      if (agg == Aggregator::gcn) {
        pre = W * N;
      } else {
        Eigen::MatrixXd input(self.rows() + N.rows(), n);
        input << self, N;
        pre = W * input;
      }
      Eigen::MatrixXd activated = k < K ? Eigen::MatrixXd(pre.cwiseMax(0.0)) : pre;
      Eigen::MatrixXd h = normalized_columns(activated);
      if (!h.allFinite()) {
        throw DivergenceError("non-finite state at layer " + std::to_string(k));
      }

      L.aggregate.push_back(std::move(A));
      L.neighbor.push_back(std::move(N));
      L.pre.push_back(std::move(pre));
      L.activated.push_back(std::move(activated));
      L.pool_pre.push_back(std::move(pool_pre));
      L.argmax.push_back(std::move(argmax));
      t.states[k].push_back(std::move(h));
    }
  }
  return t;
}

Eigen::MatrixXd forward(const LayeredBatch& batch, const FeatureMatrix& features,
                        const ModelParams& params, const Hyperparams& hp) {
  return forward_trace(batch, features, params, hp).output();
}

ModelParams backward(const ForwardTrace& t, const LayeredBatch& batch,
                     const FeatureMatrix& features, const ModelParams& params,
                     const Hyperparams& hp, const Eigen::MatrixXd& d_output) {
  const std::size_t K = hp.depth();
  ModelParams grad = params.zeros_like();

  // d_states[k][j] mirrors t.states.
  std::vector<std::vector<Eigen::MatrixXd>> d_states(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    for (const auto& s : t.states[k]) d_states[k].push_back(Eigen::MatrixXd::Zero(s.rows(), s.cols()));
  }
  d_states[K][0] = d_output;

  for (std::size_t k = K; k >= 1; --k) {
    const auto agg = hp.aggregators[k - 1];
    const auto& W = params.layers[k - 1];
    const auto& L = t.layers[k - 1];
    for (std::size_t j = 0; j + k <= K; ++j) {
      const auto& self = t.states[k - 1][j];
      const auto& children = t.states[k - 1][j + 1];
      const auto S = static_cast<Eigen::Index>(batch.fanout[j]);
      const auto& m = t.multipliers[j];
      const Eigen::Index n = self.cols();
      const Eigen::Index d = self.rows();

      Eigen::MatrixXd d_act = normalize_backward(L.activated[j], t.states[k][j], d_states[k][j]);
      Eigen::MatrixXd d_pre = k < K ? Eigen::MatrixXd(d_act.cwiseProduct(relu_mask(L.pre[j]))) : d_act;

      Eigen::MatrixXd d_neighbor;
      if (agg == Aggregator::gcn) {
        grad.layers[k - 1].noalias() += d_pre * L.neighbor[j].transpose();
        d_neighbor = W.transpose() * d_pre;
      } else {
        Eigen::MatrixXd input(d + L.neighbor[j].rows(), n);
        input << self, L.neighbor[j];
        grad.layers[k - 1].noalias() += d_pre * input.transpose();
        const Eigen::MatrixXd d_input = W.transpose() * d_pre;
        d_states[k - 1][j] += d_input.topRows(d);
        d_neighbor = d_input.bottomRows(d_input.rows() - d);
      }
      const Eigen::MatrixXd d_agg = normalize_backward(L.aggregate[j], L.neighbor[j], d_neighbor);

      auto& d_children = d_states[k - 1][j + 1];
      for (Eigen::Index p = 0; p < n; ++p) {
        const auto mult = m.segment(p * S, S);
        switch (agg) {
          case Aggregator::mean:
            d_children.middleCols(p * S, S) += d_agg.col(p) * (mult.transpose() / static_cast<double>(S));
            break;
          case Aggregator::gcn: {
            const double scale = 1.0 / static_cast<double>(S + 1);
            d_states[k - 1][j].col(p) += d_agg.col(p) * scale;
            d_children.middleCols(p * S, S) += d_agg.col(p) * (mult.transpose() * scale);
            break;
          }
          case Aggregator::max_pool:
          case Aggregator::mean_pool: {
            const auto& P = params.pools[k - 1];
            const auto pre = L.pool_pre[j].middleCols(p * S, S);
            Eigen::MatrixXd d_y = Eigen::MatrixXd::Zero(pre.rows(), S);
            if (agg == Aggregator::max_pool) {
              for (Eigen::Index r = 0; r < pre.rows(); ++r) d_y(r, L.argmax[j](r, p)) = d_agg(r, p);
            } else {
              d_y.colwise() = d_agg.col(p) / static_cast<double>(S);
            }
            const Eigen::MatrixXd d_pool_pre = d_y.cwiseProduct(relu_mask(pre));
            const Eigen::MatrixXd scaled = children.middleCols(p * S, S) * mult.asDiagonal();
            grad.pools[k - 1].noalias() += d_pool_pre * scaled.transpose();
            d_children.middleCols(p * S, S) += (P.transpose() * d_pool_pre) * mult.asDiagonal();
            break;
          }
        }
      }
    }
  }

  if (features.fused()) {
    for (std::size_t j = 0; j <= K; ++j) {
      const Eigen::MatrixXd d_x = normalize_backward(t.inputs[j], t.states[0][j], d_states[0][j]);
      const Eigen::MatrixXd d_fusion_pre = d_x.cwiseProduct(relu_mask(t.fusion_pre[j]));
      grad.fusion.noalias() += d_fusion_pre * gather(*features.secondary, batch.hops[j]).transpose();
    }
  }
  return grad;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

PairLoss pair_loss(double positive_dot, std::span<const double> negative_dots, double r,
                   double alpha) {
  PairLoss out;
  const double scale = std::pow(r, alpha);
  double derivative = 0.0;
  out.loss = -scale * clamped_log_sigmoid(positive_dot, derivative);
  out.d_positive = -scale * derivative;
  out.d_negatives.reserve(negative_dots.size());
  for (const double b : negative_dots) {
    out.loss -= clamped_log_sigmoid(-b, derivative);
    out.d_negatives.push_back(derivative);
  }
  return out;
}

double loss(const Eigen::VectorXd& z_u, const Eigen::VectorXd& z_v,
            const Eigen::MatrixXd& z_negatives, double r, double alpha) {
  std::vector<double> dots;
  for (Eigen::Index c = 0; c < z_negatives.cols(); ++c) dots.push_back(z_u.dot(z_negatives.col(c)));
  return pair_loss(z_u.dot(z_v), dots, r, alpha).loss;
}

std::vector<NodeId> PairBatch::nodes() const {
  std::vector<NodeId> out;
  for (const auto& p : pairs) {
    out.push_back(p.u);
    out.push_back(p.v);
  }
  for (const auto& negs : negatives) out.insert(out.end(), negs.begin(), negs.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

struct PairTerms {
  double loss = 0.0;
  Eigen::MatrixXd d_output;
};

PairTerms pair_terms(const PairBatch& pb, const std::vector<NodeId>& targets,
                     const Eigen::MatrixXd& z, const Hyperparams& hp, bool want_gradient) {
  if (pb.negatives.size() != pb.pairs.size()) {
    throw ShapeError("every pair needs a negative list");
  }
  auto column = [&targets](NodeId v) {
    const auto it = std::lower_bound(targets.begin(), targets.end(), v);
    if (it == targets.end() || *it != v) {
      throw ShapeError("node " + std::to_string(v) + " is not a batch target");
    }
    return static_cast<Eigen::Index>(it - targets.begin());
  };

  PairTerms out;
  if (want_gradient) out.d_output = Eigen::MatrixXd::Zero(z.rows(), z.cols());
  if (pb.pairs.empty()) return out;
  const double inv = 1.0 / static_cast<double>(pb.pairs.size());
  std::vector<double> dots;
  std::vector<Eigen::Index> neg_cols;
  for (std::size_t i = 0; i < pb.pairs.size(); ++i) {
    const auto& pair = pb.pairs[i];
    const auto cu = column(pair.u);
    const auto cv = column(pair.v);
    dots.clear();
    neg_cols.clear();
    for (const auto n : pb.negatives[i]) {
      neg_cols.push_back(column(n));
      dots.push_back(z.col(cu).dot(z.col(neg_cols.back())));
    }
    const auto term = pair_loss(z.col(cu).dot(z.col(cv)), dots, pair.r, hp.alpha);
    out.loss += term.loss * inv;
    if (!want_gradient) continue;
    out.d_output.col(cu) += inv * term.d_positive * z.col(cv);
    out.d_output.col(cv) += inv * term.d_positive * z.col(cu);
    for (std::size_t q = 0; q < neg_cols.size(); ++q) {
      out.d_output.col(cu) += inv * term.d_negatives[q] * z.col(neg_cols[q]);
      out.d_output.col(neg_cols[q]) += inv * term.d_negatives[q] * z.col(cu);
    }
  }
  return out;
}

}  // namespace

double batch_loss(const PairBatch& pairs, const LayeredBatch& batch,
                  const FeatureMatrix& features, const ModelParams& params,
                  const Hyperparams& hp) {
  const auto z = forward(batch, features, params, hp);
  return pair_terms(pairs, batch.targets(), z, hp, false).loss;
}

LossAndGradient batch_loss_and_gradient(const PairBatch& pairs, const LayeredBatch& batch,
                                        const FeatureMatrix& features,
                                        const ModelParams& params, const Hyperparams& hp) {
  const auto trace = forward_trace(batch, features, params, hp);
  auto terms = pair_terms(pairs, batch.targets(), trace.output(), hp, true);
  LossAndGradient out;
  out.loss = terms.loss;
  out.gradient = backward(trace, batch, features, params, hp, terms.d_output);
  return out;
}

}  // namespace swag
