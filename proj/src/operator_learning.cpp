#include "aenet/operator_learning.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "aenet/binary_io.hpp"
#include "aenet/errors.hpp"
#include "aenet/rng.hpp"

namespace aenet {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::aenet: return "aenet";
    case Method::pcanet: return "pcanet";
    case Method::deeponet: return "deeponet";
  }
  return "?";
}

Method method_from_string(std::string_view s) {
  if (s == "aenet") return Method::aenet;
  if (s == "pcanet") return Method::pcanet;
  if (s == "deeponet") return Method::deeponet;
  throw ConfigError("unknown method '" + std::string(s) + "'");
}

void OperatorModel::check_inputs(const Eigen::MatrixXd& inputs) const {
  if (static_cast<std::size_t>(inputs.cols()) != grid_in_.size()) {
    throw DimensionError("inputs have " + std::to_string(inputs.cols()) +
                         " values per sample but the model expects " +
                         std::to_string(grid_in_.size()) +
                         "; use predict_on_foreign_grid for other grids");
  }
}

DiscreteFunction OperatorModel::predict(const DiscreteFunction& u) const {
  if (!(u.grid() == grid_in_)) {
    throw DimensionError("input grid " + u.grid().describe() + " differs from training grid " +
                         grid_in_.describe() + "; use predict_on_foreign_grid");
  }
  const Eigen::MatrixXd out = predict(Eigen::MatrixXd(u.as_vector().transpose()));
  return {grid_out_, std::vector<double>(out.data(), out.data() + out.size())};
}

namespace {

std::vector<int> chain(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

TrainConfig with_seed(TrainConfig cfg, std::uint64_t seed) {
  cfg.seed = seed;
  return cfg;
}

}  // namespace

// ---- AENet -----------------------------------------------------------------

AENetModel::AENetModel(Grid1D grid_in, Grid1D grid_out, AutoEncoder ae, Mlp<float> gamma,
                       double output_scale)
    : OperatorModel(std::move(grid_in), std::move(grid_out)),
      ae_(std::move(ae)),
      gamma_(std::move(gamma)),
      output_scale_(output_scale) {
  if (gamma_.input_dim() != ae_.latent_dim) {
    throw DimensionError("gamma input width differs from the latent dimension");
  }
  if (static_cast<std::size_t>(gamma_.output_dim()) != this->grid_out().size()) {
    throw DimensionError("gamma output width differs from the output grid");
  }
}

Eigen::MatrixXd AENetModel::predict(const Eigen::MatrixXd& inputs) const {
  check_inputs(inputs);
  const Matrix<float> z = ae_.encoder.forward((inputs / ae_.input_scale).cast<float>());
  return gamma_.forward(z).cast<double>() * output_scale_;
}

void AENetModel::write_payload(std::ostream& out) const {
  write_autoencoder(out, ae_);
  write_checkpoint(out, gamma_);
  io::write_le(out, output_scale_);
}

AENetModel train_aenet_stage2(const AutoEncoder& ae, const FunctionPairDataset& train,
                              const std::vector<int>& gamma_hidden, const TrainConfig& cfg,
                              const QuadratureRule& rule_out, std::uint64_t init_seed,
                              std::vector<double>* history) {
  if (train.size() == 0) throw ConfigError("stage II needs training samples");
  if (!(rule_out.grid() == train.grid_out)) {
    throw DimensionError("output quadrature grid differs from the dataset output grid");
  }
  const double out_scale = max_abs_scale(train.noisy_outputs);
  const Matrix<float> z = ae.encode(train.inputs).cast<float>();
  const Matrix<float> y = (train.noisy_outputs / out_scale).cast<float>();
  const auto dims = chain(ae.latent_dim, gamma_hidden, static_cast<int>(y.cols()));
  auto gamma = Mlp<float>::he_uniform(std::span<const int>(dims), init_seed);
  auto h = aenet::train(gamma, z, y, cfg, rule_out.weights());
  if (history) *history = std::move(h);
  return {train.grid_in, train.grid_out, ae, std::move(gamma), out_scale};
}

AENetModel train_aenet(const FunctionPairDataset& train, int d_ae,
                       const AENetOptions& opts, const TrainConfig& cfg,
                       const QuadratureRule& rule_in, const QuadratureRule& rule_out,
                       std::uint64_t seed, TrainHistory* history) {
  train.validate();
  if (!(rule_in.grid() == train.grid_in)) {
    throw DimensionError("input quadrature grid differs from the dataset input grid");
  }
  const FunctionPairDataset* stage1_data = &train;
  FunctionPairDataset first, second;
  const FunctionPairDataset* stage2_data = &train;
  if (opts.split_stages) {
    if (train.size() < 2) throw ConfigError("split stages need at least 2 samples");
    const std::size_t half = train.size() / 2;
    first = train.head(half);
    second = train;
    const auto rest = static_cast<Eigen::Index>(train.size() - half);
    second.inputs = train.inputs.bottomRows(rest);
    second.clean_outputs = train.clean_outputs.bottomRows(rest);
    second.noisy_outputs = train.noisy_outputs.bottomRows(rest);
    second.params.assign(train.params.begin() + static_cast<std::ptrdiff_t>(half),
                         train.params.end());
    second.sample_seeds.assign(train.sample_seeds.begin() + static_cast<std::ptrdiff_t>(half),
                               train.sample_seeds.end());
    stage1_data = &first;
    stage2_data = &second;
  }
  auto stage1 = train_autoencoder(stage1_data->inputs, d_ae, opts.ae_arch,
                                  with_seed(cfg, derive_seed(seed, "stage1-shuffle")),
                                  rule_in, derive_seed(seed, "stage1-init"));
  std::vector<double> h2;
  auto model = train_aenet_stage2(stage1.model, *stage2_data, opts.gamma_hidden,
                                  with_seed(cfg, derive_seed(seed, "stage2-shuffle")),
                                  rule_out, derive_seed(seed, "stage2-init"), &h2);
  if (history) {
    history->stage1 = std::move(stage1.history);
    history->stage2 = std::move(h2);
  }
  return model;
}

// ---- PCANet ----------------------------------------------------------------

PCANetModel::PCANetModel(Grid1D grid_in, Grid1D grid_out, PcaModel in_pca, PcaModel out_pca,
                         Mlp<float> core, double latent_in_scale, double latent_out_scale)
    : OperatorModel(std::move(grid_in), std::move(grid_out)),
      in_pca_(std::move(in_pca)),
      out_pca_(std::move(out_pca)),
      core_(std::move(core)),
      latent_in_scale_(latent_in_scale),
      latent_out_scale_(latent_out_scale) {
  if (core_.input_dim() != in_pca_.latent_dim() || core_.output_dim() != out_pca_.latent_dim()) {
    throw DimensionError("PCANet core widths do not match the PCA dimensions");
  }
}

Eigen::MatrixXd PCANetModel::predict(const Eigen::MatrixXd& inputs) const {
  check_inputs(inputs);
  const Matrix<float> zi = (in_pca_.encode(inputs) / latent_in_scale_).cast<float>();
  const Eigen::MatrixXd zo = core_.forward(zi).cast<double>() * latent_out_scale_;
  return out_pca_.decode(zo);
}

void PCANetModel::write_payload(std::ostream& out) const {
  write_pca(out, in_pca_);
  write_pca(out, out_pca_);
  write_checkpoint(out, core_);
  io::write_le(out, latent_in_scale_);
  io::write_le(out, latent_out_scale_);
}

PCANetModel train_pcanet(const FunctionPairDataset& train, int d_in,
                         const PCANetOptions& opts, const TrainConfig& cfg,
                         std::uint64_t seed, std::vector<double>* history) {
  train.validate();
  const auto n = static_cast<int>(train.size());
  const int d_out = std::min({opts.d_out, n, static_cast<int>(train.grid_out.size())});
  PcaModel in_pca = fit_pca(train.inputs, d_in);
  PcaModel out_pca = fit_pca(train.noisy_outputs, d_out);
  const Eigen::MatrixXd zi = in_pca.encode(train.inputs);
  const Eigen::MatrixXd zo = out_pca.encode(train.noisy_outputs);
  const double in_scale = max_abs_scale(zi);
  const double out_scale = max_abs_scale(zo);
  const auto dims = chain(d_in, opts.hidden, d_out);
  auto core = Mlp<float>::he_uniform(std::span<const int>(dims), derive_seed(seed, "pcanet-init"));
  auto h = aenet::train(core, Matrix<float>((zi / in_scale).cast<float>()),
                 Matrix<float>((zo / out_scale).cast<float>()),
                 with_seed(cfg, derive_seed(seed, "pcanet-shuffle")));
  if (history) *history = std::move(h);
  return {train.grid_in, train.grid_out, std::move(in_pca), std::move(out_pca),
          std::move(core), in_scale, out_scale};
}

// ---- DeepONet --------------------------------------------------------------

Matrix<float> trunk_coordinates(const Grid1D& grid) {
  Matrix<float> c(static_cast<Index>(grid.size()), 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    c(static_cast<Index>(i), 0) =
        static_cast<float>(2.0 * (grid.node(i) - grid.x_lo()) / grid.length() - 1.0);
  }
  return c;
}

DeepONetModel::DeepONetModel(Grid1D grid_in, Grid1D grid_out, Mlp<float> branch,
                             Mlp<float> trunk, float bias, bool trunk_output_relu,
                             double input_scale, double output_scale)
    : OperatorModel(std::move(grid_in), std::move(grid_out)),
      branch_(std::move(branch)),
      trunk_(std::move(trunk)),
      bias_(bias),
      trunk_output_relu_(trunk_output_relu),
      input_scale_(input_scale),
      output_scale_(output_scale),
      coords_(trunk_coordinates(this->grid_out())) {
  if (branch_.output_dim() != trunk_.output_dim()) {
    throw DimensionError("branch and trunk output widths differ");
  }
  if (trunk_.input_dim() != 1) throw DimensionError("trunk takes one coordinate");
}

Matrix<float> DeepONetModel::trunk_features() const {
  Matrix<float> t = trunk_.forward(coords_);
  if (trunk_output_relu_) t = t.cwiseMax(0.0f);
  return t;
}

Eigen::MatrixXd DeepONetModel::predict(const Eigen::MatrixXd& inputs) const {
  check_inputs(inputs);
  const Matrix<float> b = branch_.forward((inputs / input_scale_).cast<float>());
  Matrix<float> pred = b * trunk_features().transpose();
  pred.array() += bias_;
  return pred.cast<double>() * output_scale_;
}

void DeepONetModel::write_payload(std::ostream& out) const {
  write_checkpoint(out, branch_);
  write_checkpoint(out, trunk_);
  io::write_le(out, bias_);
  io::write_le<std::uint8_t>(out, trunk_output_relu_ ? 1 : 0);
  io::write_le(out, input_scale_);
  io::write_le(out, output_scale_);
}

DeepONetModel train_deeponet(const FunctionPairDataset& train, int p,
                             const DeepONetOptions& opts, const TrainConfig& cfg,
                             const QuadratureRule& rule_out, std::uint64_t seed,
                             std::vector<double>* history) {
  train.validate();
  if (p < 1) throw ConfigError("DeepONet p must be >= 1");
  if (!(rule_out.grid() == train.grid_out)) {
    throw DimensionError("output quadrature grid differs from the dataset output grid");
  }
  const double in_scale = max_abs_scale(train.inputs);
  const double out_scale = max_abs_scale(train.noisy_outputs);
  const Matrix<float> x = (train.inputs / in_scale).cast<float>();
  const Matrix<float> y = (train.noisy_outputs / out_scale).cast<float>();
  const Matrix<float> coords = trunk_coordinates(train.grid_out);

  const auto bdims = chain(static_cast<int>(x.cols()), opts.branch_hidden, p);
  const auto tdims = chain(1, opts.trunk_hidden, p);
  auto branch = Mlp<float>::he_uniform(std::span<const int>(bdims), derive_seed(seed, "branch-init"));
  auto trunk = Mlp<float>::he_uniform(std::span<const int>(tdims), derive_seed(seed, "trunk-init"));
  std::vector<float> bias{0.0f};
  std::vector<float> bias_grad{0.0f};

  AdamState<float> adam;
  ForwardTape<float> btape, ttape;
  MlpGradients<float> bgrads, tgrads;
  Matrix<float> dpred;
  const bool relu = opts.trunk_output_relu;
  auto h = run_minibatch_epochs(
      x.rows(), with_seed(cfg, derive_seed(seed, "deeponet-shuffle")),
      [&](std::span<const Index> rows) {
        const Matrix<float> xb = gather_rows(x, rows);
        const Matrix<float> yb = gather_rows(y, rows);
        const Matrix<float> b = branch.forward(xb, btape);
        const Matrix<float> tpre = trunk.forward(coords, ttape);
        const Matrix<float> t = relu ? Matrix<float>(tpre.cwiseMax(0.0f)) : tpre;
        Matrix<float> pred = b * t.transpose();
        pred.array() += bias[0];
        const double loss = weighted_mse(pred, yb, rule_out.weights(), &dpred);
        const Matrix<float> db = dpred * t;
        Matrix<float> dt = dpred.transpose() * b;
        if (relu) dt = (tpre.array() > 0.0f).select(dt, Matrix<float>::Zero(dt.rows(), dt.cols()));
        bias_grad[0] = dpred.sum();
        branch.backward(btape, db, bgrads);
        trunk.backward(ttape, dt, tgrads);
        auto params = branch.parameter_blocks();
        auto tp = trunk.parameter_blocks();
        params.insert(params.end(), tp.begin(), tp.end());
        params.emplace_back(bias);
        auto grads = gradient_blocks(bgrads);
        auto tg = gradient_blocks(tgrads);
        grads.insert(grads.end(), tg.begin(), tg.end());
        grads.emplace_back(bias_grad);
        adam_step<float>(params, grads, adam, cfg.learning_rate);
        return loss;
      });
  if (history) *history = std::move(h);
  return {train.grid_in, train.grid_out, std::move(branch), std::move(trunk), bias[0],
          relu, in_scale, out_scale};
}

// ---- metrics ---------------------------------------------------------------

TestMetrics evaluate(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target,
                     const QuadratureRule& rule_out) {
  const auto rel = relative_errors(pred, target, rule_out.weights());
  TestMetrics m;
  m.rel_err_pct = 100.0 * rel.mean;
  m.rel_err_std_pct = 100.0 * rel.stddev;
  m.excluded = rel.excluded;
  Eigen::Map<const Eigen::VectorXd> w(rule_out.weights().data(), target.cols());
  const Eigen::VectorXd sq = (pred - target).array().square().matrix() * w;
  m.sq_err = sq.size() > 0 ? sq.mean() : 0.0;
  return m;
}

TestMetrics evaluate(const OperatorModel& model, const FunctionPairDataset& test,
                     const QuadratureRule& rule_out) {
  if (!(rule_out.grid() == model.grid_out())) {
    throw DimensionError("output quadrature grid differs from the model output grid");
  }
  return evaluate(model.predict(test.inputs), test.clean_outputs, rule_out);
}

double relative_test_error(const OperatorModel& model, const FunctionPairDataset& test,
                           const QuadratureRule& rule_out) {
  return evaluate(model, test, rule_out).rel_err_pct;
}

double squared_generalization_error(const OperatorModel& model,
                                    const FunctionPairDataset& test,
                                    const QuadratureRule& rule_out) {
  return evaluate(model, test, rule_out).sq_err;
}

DiscreteFunction predict_on_foreign_grid(const OperatorModel& model,
                                         const DiscreteFunction& u, InterpMethod method) {
  if (u.grid() == model.grid_in()) return model.predict(u);
  return model.predict(interpolate(u, model.grid_in(), method));
}

Eigen::MatrixXd predict_on_foreign_grid(const OperatorModel& model,
                                        const Eigen::MatrixXd& inputs,
                                        const Grid1D& foreign_grid, InterpMethod method) {
  if (static_cast<std::size_t>(inputs.cols()) != foreign_grid.size()) {
    throw DimensionError("inputs do not match the foreign grid");
  }
  if (foreign_grid == model.grid_in()) return model.predict(inputs);
  Eigen::MatrixXd moved(inputs.rows(), static_cast<Eigen::Index>(model.grid_in().size()));
  for (Eigen::Index r = 0; r < inputs.rows(); ++r) {
    const Eigen::VectorXd row = inputs.row(r).transpose();
    DiscreteFunction u(foreign_grid, std::vector<double>(row.data(), row.data() + row.size()));
    moved.row(r) = interpolate(u, model.grid_in(), method).as_vector().transpose();
  }
  return model.predict(moved);
}

// ---- persistence -----------------------------------------------------------

namespace {
constexpr std::uint32_t kModelVersion = 1;
}

void write_model(std::ostream& out, const OperatorModel& model) {
  out.write("AEOPM", 5);
  io::write_le(out, kModelVersion);
  io::write_string(out, to_string(model.method()));
  write_grid_binary(out, model.grid_in());
  write_grid_binary(out, model.grid_out());
  model.write_payload(out);
  if (!out) throw IoError("failed writing model bundle");
}

std::unique_ptr<OperatorModel> read_model(std::istream& in) {
  io::expect_magic(in, "AEOPM");
  if (io::read_le<std::uint32_t>(in) != kModelVersion) {
    throw IoError("unsupported model bundle version");
  }
  const Method method = method_from_string(io::read_string(in));
  Grid1D gin = read_grid_binary(in);
  Grid1D gout = read_grid_binary(in);
  switch (method) {
    case Method::aenet: {
      AutoEncoder ae = read_autoencoder(in);
      Mlp<float> gamma = read_checkpoint<float>(in);
      const double scale = io::read_le<double>(in);
      return std::make_unique<AENetModel>(gin, gout, std::move(ae), std::move(gamma), scale);
    }
    case Method::pcanet: {
      PcaModel a = read_pca(in);
      PcaModel b = read_pca(in);
      Mlp<float> core = read_checkpoint<float>(in);
      const double si = io::read_le<double>(in);
      const double so = io::read_le<double>(in);
      return std::make_unique<PCANetModel>(gin, gout, std::move(a), std::move(b),
                                           std::move(core), si, so);
    }
    case Method::deeponet: {
      Mlp<float> branch = read_checkpoint<float>(in);
      Mlp<float> trunk = read_checkpoint<float>(in);
      const float bias = io::read_le<float>(in);
      const bool relu = io::read_le<std::uint8_t>(in) != 0;
      const double si = io::read_le<double>(in);
      const double so = io::read_le<double>(in);
      return std::make_unique<DeepONetModel>(gin, gout, std::move(branch), std::move(trunk),
                                             bias, relu, si, so);
    }
  }
  throw IoError("unknown model method");
}

}  // namespace aenet
