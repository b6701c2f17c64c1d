#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "swag/aggregators.hpp"
#include "swag/rng.hpp"
#include "swag/sampling.hpp"

namespace swag {

// Model and training hyperparameters. Depth K is layer_sizes.size().
struct Hyperparams {
  double alpha = 0.0;  // exponent on the path weight in the loss
  double beta = 0.0;   // exponent on edge weights when sampling
  double gamma = 0.0;  // exponent on edge weights when aggregating
  std::vector<std::size_t> layer_sizes{10, 5};
  std::vector<std::size_t> hidden_dims{128};  // widths of layers 1..K-1
  std::size_t out_dim = 128;
  std::vector<Aggregator> aggregators{Aggregator::mean, Aggregator::mean};
  std::size_t negatives = 5;
  NegativeDistribution negative_distribution = NegativeDistribution::degree075;
  WalkConfig walk;
  double learning_rate = 0.01;
  std::size_t epochs = 10;
  std::size_t batch_size = 64;
  std::size_t workers = 1;

  std::size_t depth() const { return layer_sizes.size(); }
  // Output width of layer k (1-based).
  std::size_t layer_width(std::size_t k) const;
  void check() const;
};

// Input features, one column per graph node. `secondary`, when present, is
// fused into the primary source through a trainable matrix.
struct FeatureMatrix {
  Eigen::MatrixXd primary;
  std::optional<Eigen::MatrixXd> secondary;

  std::size_t dim() const { return static_cast<std::size_t>(primary.rows()); }
  std::size_t secondary_dim() const {
    return secondary ? static_cast<std::size_t>(secondary->rows()) : 0;
  }
  std::size_t nodes() const { return static_cast<std::size_t>(primary.cols()); }
  bool fused() const { return secondary.has_value(); }
};

// Trainable parameters. The same struct carries gradients.
//
// layers[k-1] maps CONCAT(h_v, h_N) (width 2*d_{k-1}) to d_k; for a GCN
// layer it maps the inclusive aggregate (width d_{k-1}) to d_k. pools[k-1]
// is d_{k-1} x d_{k-1} for pooling layers and empty otherwise. fusion is
// dim x secondary_dim, or empty in single-source mode.
struct ModelParams {
  std::vector<Eigen::MatrixXd> layers;
  std::vector<Eigen::MatrixXd> pools;
  Eigen::MatrixXd fusion;

  std::vector<Eigen::MatrixXd*> tensors();
  std::vector<const Eigen::MatrixXd*> tensors() const;
  ModelParams zeros_like() const;
  bool all_finite() const;
  std::size_t parameter_count() const;

  friend bool operator==(const ModelParams& a, const ModelParams& b);
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every matrix.
ModelParams init_params(const Hyperparams& hp, std::size_t input_dim, std::size_t secondary_dim,
                        Rng& rng);

// Intermediate values of a forward pass, kept for backpropagation.
struct ForwardTrace {
  // states[k][j]: layer-k state of every entry of hop j, one column each,
  // for k = 0..K and j = 0..K-k. states[K][0] is the output.
  std::vector<std::vector<Eigen::MatrixXd>> states;
  // Fusion pre-activations x1 + W0 x2 per hop (empty when not fused).
  std::vector<Eigen::MatrixXd> fusion_pre;
  // Input feature columns per hop before normalization.
  std::vector<Eigen::MatrixXd> inputs;
  // multipliers[j] = s^gamma aligned with hop j+1.
  std::vector<Eigen::VectorXd> multipliers;

  struct Layer {
    std::vector<Eigen::MatrixXd> aggregate;  // before normalization
    std::vector<Eigen::MatrixXd> neighbor;   // normalized aggregate
    std::vector<Eigen::MatrixXd> pre;        // W^k * input
    std::vector<Eigen::MatrixXd> activated;  // sigma(pre), before normalization
    std::vector<Eigen::MatrixXd> pool_pre;   // pooling pre-activations, d x (n_j * S)
    std::vector<Eigen::MatrixXi> argmax;     // max-pool winners, d x n_j
  };
  std::vector<Layer> layers;

  const Eigen::MatrixXd& output() const { return states.back().front(); }
};

// Runs the K-layer forward pass for the batch targets. Throws
// DivergenceError naming the layer when a non-finite state appears.
ForwardTrace forward_trace(const LayeredBatch& batch, const FeatureMatrix& features,
                           const ModelParams& params, const Hyperparams& hp);

// out_dim x batch matrix of unit-norm embeddings.
Eigen::MatrixXd forward(const LayeredBatch& batch, const FeatureMatrix& features,
                        const ModelParams& params, const Hyperparams& hp);

// Gradient of <d_output, output> with respect to every parameter.
ModelParams backward(const ForwardTrace& trace, const LayeredBatch& batch,
                     const FeatureMatrix& features, const ModelParams& params,
                     const Hyperparams& hp, const Eigen::MatrixXd& d_output);

// Logistic sigmoid.
double sigmoid(double x);

struct PairLoss {
  double loss = 0.0;
  double d_positive = 0.0;            // dL / d(z_u . z_v)
  std::vector<double> d_negatives;    // dL / d(z_u . z_n)
};

// -r^alpha log sig(pos) - Q * mean_n log sig(-neg_n), where Q is the number
// of negatives; sig is clamped to [1e-12, 1 - 1e-12] before the log.
PairLoss pair_loss(double positive_dot, std::span<const double> negative_dots, double r,
                   double alpha);

double loss(const Eigen::VectorXd& z_u, const Eigen::VectorXd& z_v,
            const Eigen::MatrixXd& z_negatives, double r, double alpha);

// Positive pairs with their negative draws. The layered batch for it must
// be built over `nodes()`.
struct PairBatch {
  std::vector<TrainingPair> pairs;
  std::vector<std::vector<NodeId>> negatives;

  // Sorted distinct nodes referenced by any pair or negative.
  std::vector<NodeId> nodes() const;
};

double batch_loss(const PairBatch& pairs, const LayeredBatch& batch,
                  const FeatureMatrix& features, const ModelParams& params,
                  const Hyperparams& hp);

struct LossAndGradient {
  double loss = 0.0;
  ModelParams gradient;
};

// Mean loss over the pairs and its gradient.
LossAndGradient batch_loss_and_gradient(const PairBatch& pairs, const LayeredBatch& batch,
                                        const FeatureMatrix& features,
                                        const ModelParams& params, const Hyperparams& hp);

}  // namespace swag
