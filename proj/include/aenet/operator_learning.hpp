#pragma once

// Operator estimators between discretized function spaces: AENet (encoder
// followed by a latent-to-output network), PCANet and an unstacked DeepONet,
// plus error metrics and prediction from foreign grids.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "aenet/discretization.hpp"
#include "aenet/model_reduction.hpp"
#include "aenet/pde_data.hpp"
#include "aenet/tensor_nn.hpp"

namespace aenet {

enum class Method { aenet, pcanet, deeponet };
std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

class OperatorModel {
 public:
  OperatorModel(Grid1D grid_in, Grid1D grid_out)
      : grid_in_(std::move(grid_in)), grid_out_(std::move(grid_out)) {}
  virtual ~OperatorModel() = default;

  virtual Method method() const = 0;
  /// Reduced dimension: d_ae, d_in or p.
  virtual int reduced_dim() const = 0;

  /// Rows sampled on grid_in() to rows on grid_out().
  virtual Eigen::MatrixXd predict(const Eigen::MatrixXd& inputs) const = 0;

  /// Single function; its grid must equal grid_in().
  DiscreteFunction predict(const DiscreteFunction& u) const;

  const Grid1D& grid_in() const { return grid_in_; }
  const Grid1D& grid_out() const { return grid_out_; }

  virtual void write_payload(std::ostream& out) const = 0;

 protected:
  void check_inputs(const Eigen::MatrixXd& inputs) const;

 private:
  Grid1D grid_in_;
  Grid1D grid_out_;
};

// ---- AENet -----------------------------------------------------------------

class AENetModel final : public OperatorModel {
 public:
  AENetModel(Grid1D grid_in, Grid1D grid_out, AutoEncoder ae, Mlp<float> gamma,
             double output_scale);

  Method method() const override { return Method::aenet; }
  int reduced_dim() const override { return ae_.latent_dim; }
  Eigen::MatrixXd predict(const Eigen::MatrixXd& inputs) const override;
  using OperatorModel::predict;
  void write_payload(std::ostream& out) const override;

  const AutoEncoder& autoencoder() const { return ae_; }
  const Mlp<float>& gamma() const { return gamma_; }
  double output_scale() const { return output_scale_; }

 private:
  AutoEncoder ae_;
  Mlp<float> gamma_;
  double output_scale_;
};

struct AENetOptions {
  AutoEncoderArch ae_arch;
  std::vector<int> gamma_hidden{500, 500, 500};
  /// Train stage I on the first half of the samples and stage II on the
  /// second half instead of using all samples in both stages.
  bool split_stages = false;
};

struct TrainHistory {
  std::vector<double> stage1;
  std::vector<double> stage2;
};

/// Stage II: fits Gamma on (encoder(u_i), noisy v_i) with the encoder frozen.
AENetModel train_aenet_stage2(const AutoEncoder& ae, const FunctionPairDataset& train,
                              const std::vector<int>& gamma_hidden, const TrainConfig& cfg,
                              const QuadratureRule& rule_out, std::uint64_t init_seed,
                              std::vector<double>* history = nullptr);

/// Both stages. Shuffling and initialization streams derive from `seed`.
AENetModel train_aenet(const FunctionPairDataset& train, int d_ae,
                       const AENetOptions& opts, const TrainConfig& cfg,
                       const QuadratureRule& rule_in, const QuadratureRule& rule_out,
                       std::uint64_t seed, TrainHistory* history = nullptr);

// ---- PCANet ----------------------------------------------------------------

class PCANetModel final : public OperatorModel {
 public:
  PCANetModel(Grid1D grid_in, Grid1D grid_out, PcaModel in_pca, PcaModel out_pca,
              Mlp<float> core, double latent_in_scale, double latent_out_scale);

  Method method() const override { return Method::pcanet; }
  int reduced_dim() const override { return static_cast<int>(in_pca_.latent_dim()); }
  Eigen::MatrixXd predict(const Eigen::MatrixXd& inputs) const override;
  using OperatorModel::predict;
  void write_payload(std::ostream& out) const override;

  const PcaModel& input_pca() const { return in_pca_; }
  const PcaModel& output_pca() const { return out_pca_; }

 private:
  PcaModel in_pca_;
  PcaModel out_pca_;
  Mlp<float> core_;
  double latent_in_scale_;
  double latent_out_scale_;
};

struct PCANetOptions {
  int d_out = 40;
  std::vector<int> hidden{500, 500, 500};
};

/// Input PCA on u, output PCA on the noisy training outputs, MLP between
/// the (max-abs scaled) latent spaces. d_out is capped at min(n, D_out).
PCANetModel train_pcanet(const FunctionPairDataset& train, int d_in,
                         const PCANetOptions& opts, const TrainConfig& cfg,
                         std::uint64_t seed, std::vector<double>* history = nullptr);

// ---- DeepONet --------------------------------------------------------------

class DeepONetModel final : public OperatorModel {
 public:
  DeepONetModel(Grid1D grid_in, Grid1D grid_out, Mlp<float> branch, Mlp<float> trunk,
                float bias, bool trunk_output_relu, double input_scale,
                double output_scale);

  Method method() const override { return Method::deeponet; }
  int reduced_dim() const override { return static_cast<int>(branch_.output_dim()); }
  Eigen::MatrixXd predict(const Eigen::MatrixXd& inputs) const override;
  using OperatorModel::predict;
  void write_payload(std::ostream& out) const override;

  /// Trunk features at every output node (N x p), activation included.
  Matrix<float> trunk_features() const;
  const Mlp<float>& branch() const { return branch_; }
  float bias() const { return bias_; }

 private:
  Mlp<float> branch_;
  Mlp<float> trunk_;
  float bias_;
  bool trunk_output_relu_;
  double input_scale_;
  double output_scale_;
  Matrix<float> coords_;
};

struct DeepONetOptions {
  std::vector<int> branch_hidden{100, 100, 100};
  std::vector<int> trunk_hidden{100, 100, 100};
  bool trunk_output_relu = true;
};

/// Output node coordinates mapped to [-1, 1] (N x 1).
Matrix<float> trunk_coordinates(const Grid1D& grid);

/// Branch and trunk trained jointly on all (sample, node) pairs with the
/// quadrature-weighted squared error.
DeepONetModel train_deeponet(const FunctionPairDataset& train, int p,
                             const DeepONetOptions& opts, const TrainConfig& cfg,
                             const QuadratureRule& rule_out, std::uint64_t seed,
                             std::vector<double>* history = nullptr);

// ---- metrics ---------------------------------------------------------------

struct TestMetrics {
  double rel_err_pct = 0.0;      // 100 x mean per-sample relative error
  double rel_err_std_pct = 0.0;  // spread over test samples
  double sq_err = 0.0;           // mean squared weighted error
  std::size_t excluded = 0;      // zero-norm targets skipped in rel_err
};

TestMetrics evaluate(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target,
                     const QuadratureRule& rule_out);
TestMetrics evaluate(const OperatorModel& model, const FunctionPairDataset& test,
                     const QuadratureRule& rule_out);

/// 100 x mean of ||pred - v||_S / ||v||_S over the clean test outputs.
double relative_test_error(const OperatorModel& model, const FunctionPairDataset& test,
                           const QuadratureRule& rule_out);
/// Mean of ||pred - v||_S^2 over the clean test outputs.
double squared_generalization_error(const OperatorModel& model,
                                    const FunctionPairDataset& test,
                                    const QuadratureRule& rule_out);

/// Interpolates to the model's input grid, then predicts on its output grid.
DiscreteFunction predict_on_foreign_grid(const OperatorModel& model,
                                         const DiscreteFunction& u,
                                         InterpMethod method = InterpMethod::cubic);
Eigen::MatrixXd predict_on_foreign_grid(const OperatorModel& model,
                                        const Eigen::MatrixXd& inputs,
                                        const Grid1D& foreign_grid,
                                        InterpMethod method = InterpMethod::cubic);

// ---- persistence -----------------------------------------------------------

void write_model(std::ostream& out, const OperatorModel& model);
std::unique_ptr<OperatorModel> read_model(std::istream& in);

}  // namespace aenet
