#pragma once

// Dense ReLU feedforward networks
//
//   f(x) = W_L ReLU(W_{L-1} ... ReLU(W_1 x + b_1) ... + b_{L-1}) + b_L
//
// with reverse-mode gradients, Adam, and a mini-batch training driver.
// Batches are matrices whose rows are samples. Networks are templated on the
// scalar type: float for experiment-scale training, double for gradient
// checks and small problems.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aenet/errors.hpp"
#include "aenet/rng.hpp"

namespace aenet {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

template <typename T>
struct DenseLayer {
  Matrix<T> weight;  // out x in
  Vector<T> bias;    // out

  Index in_dim() const { return weight.cols(); }
  Index out_dim() const { return weight.rows(); }
};

template <typename T>
struct MlpGradients {
  std::vector<DenseLayer<T>> layers;
};

/// Intermediate values recorded by a forward pass for backpropagation.
template <typename T>
struct ForwardTape {
  Matrix<T> input;
  std::vector<Matrix<T>> pre;   // W_l a_{l-1} + b_l, one per layer
  std::vector<Matrix<T>> post;  // ReLU(pre_l) for hidden layers
};

template <typename T>
class Mlp {
 public:
  using Scalar = T;

  Mlp() = default;

  explicit Mlp(std::vector<DenseLayer<T>> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw ConfigError("network needs at least one layer");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      if (layers_[l].bias.size() != layers_[l].out_dim()) {
        throw DimensionError("layer " + std::to_string(l) +
                             ": bias length does not match weight rows");
      }
      if (l > 0 && layers_[l].in_dim() != layers_[l - 1].out_dim()) {
        throw DimensionError("layer " + std::to_string(l) +
                             ": input width does not chain with previous layer");
      }
    }
  }

  /// He-uniform weights in +-sqrt(6 / fan_in), zero biases.
  static Mlp he_uniform(std::span<const int> dims, std::uint64_t seed) {
    if (dims.size() < 2) {
      throw ConfigError("network dims need an input and an output size");
    }
    for (int d : dims) {
      if (d <= 0) throw ConfigError("network dims must be positive");
    }
    Rng rng(seed);
    std::vector<DenseLayer<T>> layers;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      const int fan_in = dims[l];
      const double limit = std::sqrt(6.0 / fan_in);
      std::uniform_real_distribution<double> dist(-limit, limit);
      DenseLayer<T> layer{Matrix<T>(dims[l + 1], fan_in),
                          Vector<T>::Zero(dims[l + 1])};
      for (Index r = 0; r < layer.weight.rows(); ++r) {
        for (Index c = 0; c < layer.weight.cols(); ++c) {
          layer.weight(r, c) = static_cast<T>(dist(rng));
        }
      }
      layers.push_back(std::move(layer));
    }
    return Mlp(std::move(layers));
  }

  static Mlp he_uniform(std::initializer_list<int> dims, std::uint64_t seed) {
    std::vector<int> d(dims);
    return he_uniform(std::span<const int>(d), seed);
  }

  Index input_dim() const { return layers_.front().in_dim(); }
  Index output_dim() const { return layers_.back().out_dim(); }
  std::size_t depth() const { return layers_.size(); }
  bool empty() const { return layers_.empty(); }

  std::vector<int> dims() const {
    std::vector<int> d{static_cast<int>(input_dim())};
    for (const auto& l : layers_) d.push_back(static_cast<int>(l.out_dim()));
    return d;
  }

  const std::vector<DenseLayer<T>>& layers() const { return layers_; }

  void set_layer(std::size_t l, Matrix<T> weight, Vector<T> bias) {
    if (weight.rows() != layers_.at(l).weight.rows() ||
        weight.cols() != layers_[l].weight.cols() ||
        bias.size() != layers_[l].bias.size()) {
      throw DimensionError("set_layer: shape mismatch");
    }
    layers_[l].weight = std::move(weight);
    layers_[l].bias = std::move(bias);
  }

  Matrix<T> forward(const Matrix<T>& batch) const {
    check_input(batch);
    Matrix<T> a = batch;
    Matrix<T> z;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      z.noalias() = a * layers_[l].weight.transpose();
      z.rowwise() += layers_[l].bias.transpose();
      if (l + 1 < layers_.size()) {
        a = z.cwiseMax(T(0));
      } else {
        return z;
      }
    }
    return z;
  }

  Vector<T> forward_one(const Vector<T>& x) const {
    Matrix<T> batch = x.transpose();
    return forward(batch).row(0).transpose();
  }

  Matrix<T> forward(const Matrix<T>& batch, ForwardTape<T>& tape) const {
    check_input(batch);
    tape.input = batch;
    tape.pre.resize(layers_.size());
    tape.post.resize(layers_.size() - 1);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const Matrix<T>& a = l == 0 ? tape.input : tape.post[l - 1];
      Matrix<T>& z = tape.pre[l];
      z.noalias() = a * layers_[l].weight.transpose();
      z.rowwise() += layers_[l].bias.transpose();
      if (l + 1 < layers_.size()) tape.post[l] = z.cwiseMax(T(0));
    }
    return tape.pre.back();
  }

  /// Backpropagates dLoss/dOutput through the recorded pass. Parameter
  /// gradients are written to `grads`; the input gradient is returned.
  Matrix<T> backward(const ForwardTape<T>& tape, const Matrix<T>& grad_out,
                     MlpGradients<T>& grads) const {
    if (grad_out.cols() != output_dim() || grad_out.rows() != tape.input.rows()) {
      throw DimensionError("backward: output gradient shape mismatch");
    }
    grads.layers.resize(layers_.size());
    Matrix<T> delta = grad_out;
    Matrix<T> upstream;
    for (std::size_t l = layers_.size(); l-- > 0;) {
      const Matrix<T>& a = l == 0 ? tape.input : tape.post[l - 1];
      grads.layers[l].weight.noalias() = delta.transpose() * a;
      grads.layers[l].bias = delta.colwise().sum().transpose();
      upstream.noalias() = delta * layers_[l].weight;
      if (l > 0) {
        delta = (tape.pre[l - 1].array() > T(0))
                    .select(upstream, Matrix<T>::Zero(upstream.rows(), upstream.cols()));
      }
    }
    return upstream;
  }

  /// Flat views of all parameters in layer order (weight, then bias).
  std::vector<std::span<T>> parameter_blocks() {
    std::vector<std::span<T>> blocks;
    for (auto& l : layers_) {
      blocks.emplace_back(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
      blocks.emplace_back(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
    }
    return blocks;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) {
      n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    }
    return n;
  }

  template <typename U>
  Mlp<U> cast() const {
    std::vector<DenseLayer<U>> out;
    for (const auto& l : layers_) {
      out.push_back({l.weight.template cast<U>(), l.bias.template cast<U>()});
    }
    return Mlp<U>(std::move(out));
  }

  friend bool operator==(const Mlp& a, const Mlp& b) {
    if (a.layers_.size() != b.layers_.size()) return false;
    for (std::size_t l = 0; l < a.layers_.size(); ++l) {
      const auto& x = a.layers_[l];
      const auto& y = b.layers_[l];
      if (x.weight.rows() != y.weight.rows() || x.weight.cols() != y.weight.cols() ||
          x.weight != y.weight || x.bias != y.bias) {
        return false;
      }
    }
    return true;
  }

 private:
  void check_input(const Matrix<T>& batch) const {
    if (layers_.empty()) throw ConfigError("forward on an empty network");
    if (batch.cols() != input_dim()) {
      throw DimensionError("network expects input width " +
                           std::to_string(input_dim()) + ", got " +
                           std::to_string(batch.cols()));
    }
  }

  std::vector<DenseLayer<T>> layers_;
};

template <typename T>
std::vector<std::span<const T>> gradient_blocks(const MlpGradients<T>& g) {
  std::vector<std::span<const T>> blocks;
  for (const auto& l : g.layers) {
    blocks.emplace_back(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
    blocks.emplace_back(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
  }
  return blocks;
}

/// Weighted squared error averaged over the batch:
///   loss = (1/B) sum_samples sum_j w_j (pred_j - target_j)^2.
/// Empty `coord_weights` means unit weights. When `grad` is non-null it
/// receives dLoss/dPred.
template <typename T>
double weighted_mse(const Matrix<T>& pred, const Matrix<T>& target,
                    std::span<const double> coord_weights, Matrix<T>* grad) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw DimensionError("loss: prediction and target shapes differ");
  }
  if (pred.rows() == 0) throw ConfigError("loss on an empty batch");
  if (!coord_weights.empty() &&
      static_cast<Index>(coord_weights.size()) != pred.cols()) {
    throw DimensionError("loss: coordinate weights do not match output width");
  }
  const double inv_batch = 1.0 / static_cast<double>(pred.rows());
  Matrix<T> diff = pred - target;
  // Per-coordinate sums first, so uniform weights scale the loss exactly.
  const Eigen::VectorXd col_sq =
      diff.template cast<double>().array().square().colwise().sum().transpose();
  double loss = 0.0;
  for (Index j = 0; j < col_sq.size(); ++j) {
    loss += (coord_weights.empty() ? 1.0 : coord_weights[static_cast<std::size_t>(j)]) *
            col_sq(j);
  }
  loss *= inv_batch;
  if (grad) {
    if (coord_weights.empty()) {
      *grad = diff * static_cast<T>(2.0 * inv_batch);
    } else {
      Eigen::Map<const Eigen::VectorXd> w(coord_weights.data(), pred.cols());
      Vector<T> scale = (w * (2.0 * inv_batch)).template cast<T>();
      *grad = diff.array().rowwise() * scale.transpose().array();
    }
  }
  return loss;
}

template <typename T>
struct LossAndGradients {
  double loss = 0.0;
  MlpGradients<T> grads;
};

template <typename T>
LossAndGradients<T> mse_and_grad(const Mlp<T>& net, const Matrix<T>& inputs,
                                 const Matrix<T>& targets,
                                 std::span<const double> coord_weights = {}) {
  if (inputs.rows() == 0) throw ConfigError("mse_and_grad on an empty batch");
  ForwardTape<T> tape;
  Matrix<T> pred = net.forward(inputs, tape);
  Matrix<T> dpred;
  LossAndGradients<T> out;
  out.loss = weighted_mse(pred, targets, coord_weights, &dpred);
  net.backward(tape, dpred, out.grads);
  return out;
}

template <typename T>
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step = 0;
  std::vector<Vector<T>> first_moment;
  std::vector<Vector<T>> second_moment;
};

/// One bias-corrected Adam update. Moment buffers are sized on first use.
template <typename T>
void adam_step(std::span<const std::span<T>> params,
               std::span<const std::span<const T>> grads, AdamState<T>& state,
               double learning_rate) {
  if (params.size() != grads.size()) {
    throw DimensionError("adam: parameter and gradient block counts differ");
  }
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.push_back(Vector<T>::Zero(static_cast<Index>(p.size())));
      state.second_moment.push_back(Vector<T>::Zero(static_cast<Index>(p.size())));
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw DimensionError("adam: state does not match parameter blocks");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const T b1 = static_cast<T>(state.beta1);
  const T b2 = static_cast<T>(state.beta2);
  const T c1 = static_cast<T>(1.0 / (1.0 - std::pow(state.beta1, t)));
  const T c2 = static_cast<T>(1.0 / (1.0 - std::pow(state.beta2, t)));
  const T lr = static_cast<T>(learning_rate);
  const T eps = static_cast<T>(state.eps);
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k].size() != grads[k].size() ||
        static_cast<Index>(params[k].size()) != state.first_moment[k].size()) {
      throw DimensionError("adam: block " + std::to_string(k) + " shape mismatch");
    }
    const Index n = static_cast<Index>(params[k].size());
    Eigen::Map<Vector<T>> p(params[k].data(), n);
    Eigen::Map<const Vector<T>> g(grads[k].data(), n);
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    m = b1 * m + (T(1) - b1) * g;
    v = b2 * v + (T(1) - b2) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() * c1) / ((v.array() * c2).sqrt() + eps);
  }
}

template <typename T>
void adam_step(Mlp<T>& net, const MlpGradients<T>& grads, AdamState<T>& state,
               double learning_rate) {
  auto p = net.parameter_blocks();
  auto g = gradient_blocks(grads);
  adam_step<T>(std::span<const std::span<T>>(p),
               std::span<const std::span<const T>>(g), state, learning_rate);
}

struct TrainConfig {
  int epochs = 500;
  double learning_rate = 1e-3;
  int batch_size = 64;
  std::uint64_t seed = 0;
  bool shuffle = true;

  void validate() const;
};

/// Runs `epochs` passes of mini-batch steps over `n_samples` rows. `step`
/// receives the row indices of one batch and returns its loss. Returns the
/// per-epoch mean loss; throws DivergenceError on a non-finite batch loss.
using BatchStep = std::function<double(std::span<const Index>)>;
std::vector<double> run_minibatch_epochs(Index n_samples, const TrainConfig& cfg,
                                         const BatchStep& step);

template <typename T>
Matrix<T> gather_rows(const Matrix<T>& m, std::span<const Index> rows) {
  Matrix<T> out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Index>(i)) = m.row(rows[i]);
  }
  return out;
}

/// Fits `net` to (inputs, targets) with Adam on the weighted MSE. Returns
/// the per-epoch loss history.
template <typename T>
std::vector<double> train(Mlp<T>& net, const Matrix<T>& inputs,
                          const Matrix<T>& targets, const TrainConfig& cfg,
                          std::span<const double> coord_weights = {}) {
  cfg.validate();
  if (inputs.rows() == 0) throw ConfigError("train on an empty dataset");
  if (inputs.rows() != targets.rows()) {
    throw DimensionError("train: input and target counts differ");
  }
  AdamState<T> adam;
  ForwardTape<T> tape;
  MlpGradients<T> grads;
  Matrix<T> dpred;
  return run_minibatch_epochs(inputs.rows(), cfg, [&](std::span<const Index> rows) {
    Matrix<T> x = gather_rows(inputs, rows);
    Matrix<T> y = gather_rows(targets, rows);
    Matrix<T> pred = net.forward(x, tape);
    const double loss = weighted_mse(pred, y, coord_weights, &dpred);
    net.backward(tape, dpred, grads);
    adam_step(net, grads, adam, cfg.learning_rate);
    return loss;
  });
}

/// Measured class parameters (depth L, width p, nonzeros K, magnitude
/// bound kappa, output bound M over a probe set).
struct NetworkClassStats {
  std::size_t depth = 0;
  std::size_t width = 0;
  std::size_t nonzeros = 0;
  double max_abs_param = 0.0;
  double sup_output = 0.0;
};

template <typename T>
NetworkClassStats network_class_stats(const Mlp<T>& net,
                                      const Matrix<T>& probe_inputs) {
  NetworkClassStats s;
  s.depth = net.depth();
  for (const auto& l : net.layers()) {
    s.width = std::max<std::size_t>(s.width, static_cast<std::size_t>(l.out_dim()));
    s.nonzeros += static_cast<std::size_t>((l.weight.array() != T(0)).count() +
                                           (l.bias.array() != T(0)).count());
    s.max_abs_param = std::max({s.max_abs_param,
                                static_cast<double>(l.weight.cwiseAbs().maxCoeff()),
                                static_cast<double>(l.bias.cwiseAbs().maxCoeff())});
  }
  if (probe_inputs.rows() > 0) {
    s.sup_output = static_cast<double>(net.forward(probe_inputs).cwiseAbs().maxCoeff());
  }
  return s;
}

// Checkpoints: "AEMLP" magic, u32 version, u8 scalar size (4 or 8), u32 layer
// count, u32 dims[layers + 1], then per layer the row-major weight matrix and
// the bias, all little-endian.
template <typename T>
void write_checkpoint(std::ostream& out, const Mlp<T>& net);
template <typename T>
Mlp<T> read_checkpoint(std::istream& in);

void write_loss_history(std::ostream& out, std::span<const double> history);

}  // namespace aenet
