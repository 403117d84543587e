#pragma once

// Experiment harness: configuration, dataset and model caching, and the
// sweeps behind the comparison tables and error curves.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "aenet/discretization.hpp"
#include "aenet/model_reduction.hpp"
#include "aenet/operator_learning.hpp"
#include "aenet/pde_data.hpp"

namespace aenet {

inline constexpr int kConfigSchemaVersion = 1;

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  Family family = Family::transport;
  std::size_t grid_in = 512;
  std::size_t grid_out = 512;
  std::size_t n_train = 2000;
  std::size_t n_test = 500;
  std::vector<int> reduced_dims{1, 2, 4, 6, 8, 10, 20, 40, 100};
  std::vector<Method> methods{Method::aenet, Method::pcanet, Method::deeponet};
  std::vector<std::size_t> n_sweep{125, 250, 500, 1000, 2000};
  std::vector<double> sigmas{0.0, 0.1, 0.3, 0.5};
  std::vector<std::size_t> test_grids{8, 16, 32, 64, 128, 256, 512};
  int repeats = 3;
  std::uint64_t seed = 0;
  bool desk_scale = false;
  std::string output_dir = "out";

  int epochs = 500;
  double learning_rate = 1e-3;
  int batch_size = 64;
  int ae_width = 500;
  int gamma_width = 500;
  int pcanet_width = 500;
  int deeponet_width = 500;
  int pcanet_d_out = 40;
  int sweep_dim = 2;          // latent dimension of the n, noise and grid sweeps
  double noise_sigma = 0.0;   // output noise of the dimension sweep
  bool split_stages = false;
  bool deeponet_trunk_relu = true;
  QuadratureKind quadrature = QuadratureKind::midpoint;
  InterpMethod transfer_interp = InterpMethod::cubic;
  int workers = 1;
  bool cache_datasets = true;
  bool cache_models = false;

  /// Throws ConfigError on empty lists, nonpositive sizes and the like.
  void validate() const;

  /// Canonical key = value text; parse_config(to_text()) reproduces the config.
  std::string to_text() const;
  /// Hash of to_text(), as 16 hex digits.
  std::string fingerprint() const;

  TrainConfig train_config() const;
  Grid1D input_grid() const { return default_grid(family, grid_in); }
  Grid1D output_grid() const { return default_grid(family, grid_out); }
  std::size_t dataset_size() const;
};

using ConfigMap = std::map<std::string, std::string>;

/// key = value lines; '#' starts a comment; lists are comma separated.
ConfigMap parse_config_text(const std::string& text);
ConfigMap read_config_file(const std::filesystem::path& path);
/// "key=value" into `into`; throws ConfigError on a malformed override.
void apply_override(ConfigMap& into, const std::string& assignment);

/// Defaults, then desk-scale defaults for keys not given, then the keys.
/// Unknown keys and a schema_version other than the supported one throw.
ExperimentConfig build_config(const ConfigMap& kv);
ExperimentConfig parse_config(const std::string& text);

/// Keys the schema accepts, in canonical order, with one-line descriptions.
const std::vector<std::pair<std::string, std::string>>& config_schema();

// ---- results ---------------------------------------------------------------

/// One trained-and-evaluated run of a sweep cell.
struct ResultRow {
  std::string sweep;
  std::string method;
  std::string family;
  int reduced_dim = 0;
  std::size_t n_train = 0;
  double sigma = 0.0;
  std::size_t test_grid = 0;
  int repeat = 0;
  std::uint64_t seed = 0;
  double rel_err_pct = 0.0;
  double rel_err_std_pct = 0.0;
  double sq_err = 0.0;
  double wallclock_s = 0.0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

/// Mean and sample standard deviation over the successful repeats of a cell.
struct CellSummary {
  std::string sweep;
  std::string method;
  std::string family;
  int reduced_dim = 0;
  std::size_t n_train = 0;
  double sigma = 0.0;
  std::size_t test_grid = 0;
  int runs = 0;
  int failed = 0;
  double rel_err_mean = 0.0;
  double rel_err_std = 0.0;
  double sq_err_mean = 0.0;
  double sq_err_std = 0.0;
  double wallclock_mean = 0.0;
};

std::vector<CellSummary> summarize(const std::vector<ResultRow>& rows);

/// Named numeric table for auxiliary exports (scree plots, latent features).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct SweepResult {
  std::string name;
  std::vector<ResultRow> rows;
  std::vector<CellSummary> summary;
  std::map<std::string, Table> extras;

  bool any_failed() const;
};

/// True when the two row lists agree in every field except wallclock.
bool same_metrics(const std::vector<ResultRow>& a, const std::vector<ResultRow>& b);

/// Least-squares line y = intercept + slope x with coefficient of
/// determination. `defined` is false for fewer than two distinct x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool defined = false;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
/// Fit of log y against log x.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Whether a series of means moves in the given direction up to its
/// 1-std bands: each step may go against the direction by at most
/// std[i] + std[i+1].
bool monotone_within_bands(const std::vector<double>& mean, const std::vector<double>& std,
                           bool increasing);

// ---- workspace -------------------------------------------------------------

using LogFn = std::function<void(const std::string&)>;

/// Owns the clean dataset of one config and a cache of trained models, so
/// sweeps that share a run (same method, dimension, n, noise and seed) train
/// it once.
class Workspace {
 public:
  explicit Workspace(ExperimentConfig cfg, LogFn log = {});

  const ExperimentConfig& config() const { return cfg_; }
  const QuadratureRule& rule_in() const { return rule_in_; }
  const QuadratureRule& rule_out() const { return rule_out_; }

  /// Clean split with dataset_size() training samples; generated once and,
  /// with cache_datasets, stored under output_dir/datasets.
  const DatasetSplit& dataset();

  /// First n training samples with N(0, sigma^2) output noise. The noise of
  /// sample i depends only on the master seed and i.
  FunctionPairDataset training_set(std::size_t n, double sigma);

  /// Model seed of a repeat: master seed + repeat.
  std::uint64_t repeat_seed(int repeat) const;

  struct TrainedModel {
    std::shared_ptr<const OperatorModel> model;
    double wallclock_s = 0.0;
  };
  TrainedModel model(Method method, int d, std::size_t n, double sigma, int repeat);

  /// Stage I autoencoder of the matching AENet run (shared with model()).
  AutoEncoder autoencoder(int d, std::size_t n, int repeat, double* wallclock_s = nullptr);

  void log(const std::string& msg) const;

 private:
  std::string model_key(Method method, int d, std::size_t n, double sigma, int repeat) const;
  std::unique_ptr<OperatorModel> train_model(Method method, int d,
                                             const FunctionPairDataset& train,
                                             std::uint64_t seed) const;

  ExperimentConfig cfg_;
  LogFn log_;
  QuadratureRule rule_in_;
  QuadratureRule rule_out_;
  std::optional<DatasetSplit> data_;
  std::mutex data_mutex_;
  std::mutex cache_mutex_;
  std::map<std::string, TrainedModel> models_;
  std::map<std::string, AutoEncoder> autoencoders_;
};

// ---- sweeps ----------------------------------------------------------------

/// Every (method, reduced dim, repeat) on the config's family.
SweepResult run_dim_sweep(Workspace& ws);
/// AENet at sweep_dim for each n in n_sweep; extras["fit"] holds the
/// log-log fit of the mean squared error against n.
SweepResult run_sample_complexity(Workspace& ws);
/// AENet at sweep_dim on n_train samples for each sigma; evaluation is
/// against clean test outputs. extras["fit"] holds the linear fit against
/// sigma^2.
SweepResult run_noise_sweep(Workspace& ws);
/// AENet at sweep_dim trained on the native grid, evaluated on test inputs
/// regenerated on each test grid and interpolated back.
SweepResult run_grid_transfer(Workspace& ws);
/// Relative projection errors of PCA and the autoencoder on the test
/// inputs for each reduced dim; extras hold the singular values, latent
/// features at d = 2 and a radial histogram of those latents.
SweepResult run_projection_comparison(Workspace& ws);

enum class SweepKind { dims, sample_complexity, noise, grid_transfer, projection };
std::string_view to_string(SweepKind k);
SweepKind sweep_kind_from_string(std::string_view s);
SweepResult run_sweep(Workspace& ws, SweepKind kind);

}  // namespace aenet
