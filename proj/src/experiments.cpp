#include "aenet/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "aenet/errors.hpp"
#include "aenet/parallel.hpp"
#include "aenet/rng.hpp"

namespace aenet {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

// ---- results ---------------------------------------------------------------

std::vector<CellSummary> summarize(const std::vector<ResultRow>& rows) {
  struct Acc {
    CellSummary cell;
    std::vector<double> rel, sq, wall;
  };
  std::vector<Acc> cells;
  for (const auto& r : rows) {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const Acc& a) {
      const auto& c = a.cell;
      return c.sweep == r.sweep && c.method == r.method && c.family == r.family &&
             c.reduced_dim == r.reduced_dim && c.n_train == r.n_train && c.sigma == r.sigma &&
             c.test_grid == r.test_grid;
    });
    if (it == cells.end()) {
      Acc a;
      a.cell = {r.sweep, r.method, r.family, r.reduced_dim, r.n_train, r.sigma, r.test_grid};
      cells.push_back(std::move(a));
      it = std::prev(cells.end());
    }
    if (r.ok()) {
      ++it->cell.runs;
      it->rel.push_back(r.rel_err_pct);
      it->sq.push_back(r.sq_err);
      it->wall.push_back(r.wallclock_s);
    } else {
      ++it->cell.failed;
    }
  }
  std::vector<CellSummary> out;
  for (auto& a : cells) {
    a.cell.rel_err_mean = mean_of(a.rel);
    a.cell.rel_err_std = std_of(a.rel);
    a.cell.sq_err_mean = mean_of(a.sq);
    a.cell.sq_err_std = std_of(a.sq);
    a.cell.wallclock_mean = mean_of(a.wall);
    if (a.cell.runs == 0) {
      a.cell.rel_err_mean = a.cell.sq_err_mean = std::nan("");
    }
    out.push_back(a.cell);
  }
  return out;
}

bool SweepResult::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const ResultRow& r) { return !r.ok(); });
}

bool same_metrics(const std::vector<ResultRow>& a, const std::vector<ResultRow>& b) {
  if (a.size() != b.size()) return false;
  auto same_double = [](double x, double y) {
    return x == y || (std::isnan(x) && std::isnan(y));
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.sweep != y.sweep || x.method != y.method || x.family != y.family ||
        x.reduced_dim != y.reduced_dim || x.n_train != y.n_train || x.sigma != y.sigma ||
        x.test_grid != y.test_grid || x.repeat != y.repeat || x.seed != y.seed ||
        x.status != y.status || !same_double(x.rel_err_pct, y.rel_err_pct) ||
        !same_double(x.rel_err_std_pct, y.rel_err_std_pct) || !same_double(x.sq_err, y.sq_err)) {
      return false;
    }
  }
  return true;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("line fit: x and y lengths differ");
  LineFit f;
  const std::size_t n = x.size();
  if (n < 2) return f;
  const double mx = mean_of(x), my = mean_of(y);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0)) return f;
  f.defined = true;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw ConfigError("log-log fit needs positive values");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

bool monotone_within_bands(const std::vector<double>& mean, const std::vector<double>& std,
                           bool increasing) {
  if (mean.size() != std.size()) throw DimensionError("band check: lengths differ");
  for (std::size_t i = 0; i + 1 < mean.size(); ++i) {
    const double step = mean[i + 1] - mean[i];
    const double against = increasing ? -step : step;
    if (against > std[i] + std[i + 1]) return false;
  }
  return true;
}

// ---- workspace -------------------------------------------------------------

Workspace::Workspace(ExperimentConfig cfg, LogFn log)
    : cfg_(std::move(cfg)),
      log_(std::move(log)),
      rule_in_(make_quadrature(cfg_.input_grid(), cfg_.quadrature)),
      rule_out_(make_quadrature(cfg_.output_grid(), cfg_.quadrature)) {
  cfg_.validate();
}

void Workspace::log(const std::string& msg) const {
  if (log_) log_(msg);
}

const DatasetSplit& Workspace::dataset() {
  std::lock_guard lock(data_mutex_);
  if (data_) return *data_;
  const std::size_t n = cfg_.dataset_size();
  const auto dir = std::filesystem::path(cfg_.output_dir) / "datasets";
  const std::string stem = std::string(to_string(cfg_.family)) + "_in" +
                           std::to_string(cfg_.grid_in) + "_out" + std::to_string(cfg_.grid_out) +
                           "_n" + std::to_string(n) + "_t" + std::to_string(cfg_.n_test) + "_s" +
                           std::to_string(cfg_.seed);
  const auto train_path = dir / (stem + "_train.bin");
  const auto test_path = dir / (stem + "_test.bin");
  if (cfg_.cache_datasets && std::filesystem::exists(train_path) &&
      std::filesystem::exists(test_path)) {
    std::ifstream a(train_path, std::ios::binary), b(test_path, std::ios::binary);
    DatasetSplit s{read_dataset_binary(a), read_dataset_binary(b)};
    log("loaded cached dataset " + train_path.string());
    data_ = std::move(s);
    return *data_;
  }
  const auto t0 = Clock::now();
  log("generating " + std::string(to_string(cfg_.family)) + " dataset: " + std::to_string(n) +
      " train + " + std::to_string(cfg_.n_test) + " test samples");
  data_ = make_dataset(cfg_.family, n, cfg_.n_test, cfg_.input_grid(), cfg_.output_grid(), 0.0,
                       cfg_.seed, cfg_.workers);
  char took[32];
  std::snprintf(took, sizeof took, "%.1f", seconds_since(t0));
  log(std::string("dataset ready in ") + took + " s");
  if (cfg_.cache_datasets) {
    std::filesystem::create_directories(dir);
    std::ofstream a(train_path, std::ios::binary), b(test_path, std::ios::binary);
    write_dataset_binary(a, data_->train);
    write_dataset_binary(b, data_->test);
    if (!a || !b) throw IoError("failed writing dataset cache under " + dir.string());
  }
  return *data_;
}

FunctionPairDataset Workspace::training_set(std::size_t n, double sigma) {
  const auto& full = dataset().train;
  if (n > full.size()) {
    throw ConfigError("requested " + std::to_string(n) + " training samples but the dataset has " +
                      std::to_string(full.size()));
  }
  return add_noise(full.head(n), sigma, derive_seed(cfg_.seed, "noise"));
}

std::uint64_t Workspace::repeat_seed(int repeat) const {
  return cfg_.seed + static_cast<std::uint64_t>(repeat);
}

std::string Workspace::model_key(Method method, int d, std::size_t n, double sigma,
                                 int repeat) const {
  // everything that changes a trained model, and nothing else
  std::string k = std::string(to_string(cfg_.family)) + "|" + std::to_string(cfg_.grid_in) + "|" +
                  std::to_string(cfg_.grid_out) + "|" + std::string(to_string(cfg_.quadrature)) +
                  "|" + std::to_string(cfg_.seed) + "|" + std::to_string(cfg_.epochs) + "|" +
                  g17(cfg_.learning_rate) + "|" + std::to_string(cfg_.batch_size) + "|";
  switch (method) {
    case Method::aenet:
      k += std::to_string(cfg_.ae_width) + "|" + std::to_string(cfg_.gamma_width) + "|" +
           (cfg_.split_stages ? "split" : "joint");
      break;
    case Method::pcanet:
      k += std::to_string(cfg_.pcanet_width) + "|" + std::to_string(cfg_.pcanet_d_out);
      break;
    case Method::deeponet:
      k += std::to_string(cfg_.deeponet_width) + "|" + (cfg_.deeponet_trunk_relu ? "relu" : "lin");
      break;
  }
  return std::string(to_string(method)) + "-d" + std::to_string(d) + "-n" + std::to_string(n) +
         "-sigma" + g17(sigma) + "-r" + std::to_string(repeat_seed(repeat)) + "-" +
         hex(hash_tag(k));
}

std::unique_ptr<OperatorModel> Workspace::train_model(Method method, int d,
                                                      const FunctionPairDataset& train,
                                                      std::uint64_t seed) const {
  const TrainConfig tc = cfg_.train_config();
  switch (method) {
    case Method::aenet: {
      AENetOptions o;
      o.ae_arch.encoder_hidden.assign(4, cfg_.ae_width);
      o.ae_arch.decoder_hidden.assign(3, cfg_.ae_width);
      o.gamma_hidden.assign(3, cfg_.gamma_width);
      o.split_stages = cfg_.split_stages;
      return std::make_unique<AENetModel>(
          train_aenet(train, d, o, tc, rule_in_, rule_out_, seed));
    }
    case Method::pcanet: {
      PCANetOptions o;
      o.d_out = cfg_.pcanet_d_out;
      o.hidden.assign(3, cfg_.pcanet_width);
      return std::make_unique<PCANetModel>(train_pcanet(train, d, o, tc, seed));
    }
    case Method::deeponet: {
      DeepONetOptions o;
      o.branch_hidden.assign(3, cfg_.deeponet_width);
      o.trunk_hidden.assign(3, cfg_.deeponet_width);
      o.trunk_output_relu = cfg_.deeponet_trunk_relu;
      return std::make_unique<DeepONetModel>(train_deeponet(train, d, o, tc, rule_out_, seed));
    }
  }
  throw ConfigError("unknown method");
}

Workspace::TrainedModel Workspace::model(Method method, int d, std::size_t n, double sigma,
                                         int repeat) {
  const std::string key = model_key(method, d, n, sigma, repeat);
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = models_.find(key); it != models_.end()) return it->second;
  }
  const auto path = std::filesystem::path(cfg_.output_dir) / "models" / (key + ".bin");
  TrainedModel tm;
  if (cfg_.cache_models && std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    tm.model = read_model(in);
    std::ifstream w(path.string() + ".wall");
    w >> tm.wallclock_s;
    log("loaded cached model " + path.filename().string());
  } else {
    const FunctionPairDataset train = training_set(n, sigma);
    const auto t0 = Clock::now();
    tm.model = train_model(method, d, train, repeat_seed(repeat));
    tm.wallclock_s = seconds_since(t0);
    if (cfg_.cache_models) {
      std::filesystem::create_directories(path.parent_path());
      std::ofstream out(path, std::ios::binary);
      write_model(out, *tm.model);
      std::ofstream w(path.string() + ".wall");
      w << g17(tm.wallclock_s) << "\n";
      if (!out) throw IoError("failed writing model cache " + path.string());
    }
  }
  std::lock_guard lock(cache_mutex_);
  return models_.emplace(key, tm).first->second;
}

AutoEncoder Workspace::autoencoder(int d, std::size_t n, int repeat, double* wallclock_s) {
  // AENet stage I ignores output noise, so any cached AENet run at (d, n) shares it
  const std::string key = model_key(Method::aenet, d, n, 0.0, repeat);
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = models_.find(key); it != models_.end()) {
      if (wallclock_s) *wallclock_s = it->second.wallclock_s;
      return static_cast<const AENetModel&>(*it->second.model).autoencoder();
    }
    if (auto it = autoencoders_.find(key); it != autoencoders_.end()) {
      if (wallclock_s) *wallclock_s = 0.0;
      return it->second;
    }
  }
  const FunctionPairDataset train = training_set(n, 0.0);
  const std::size_t rows = cfg_.split_stages ? n / 2 : n;
  if (rows < 1) throw ConfigError("autoencoder needs at least one training sample");
  AutoEncoderArch arch;
  arch.encoder_hidden.assign(4, cfg_.ae_width);
  arch.decoder_hidden.assign(3, cfg_.ae_width);
  TrainConfig tc = cfg_.train_config();
  const std::uint64_t seed = repeat_seed(repeat);
  tc.seed = derive_seed(seed, "stage1-shuffle");
  const auto t0 = Clock::now();
  auto res = train_autoencoder(train.inputs.topRows(static_cast<Eigen::Index>(rows)), d, arch, tc,
                               rule_in_, derive_seed(seed, "stage1-init"));
  if (wallclock_s) *wallclock_s = seconds_since(t0);
  std::lock_guard lock(cache_mutex_);
  return autoencoders_.emplace(key, std::move(res.model)).first->second;
}

// ---- sweeps ----------------------------------------------------------------

namespace {

struct Job {
  ResultRow row;
  std::function<void(ResultRow&)> run;
};

std::vector<ResultRow> run_jobs(Workspace& ws, std::vector<Job> jobs) {
  std::vector<ResultRow> rows(jobs.size());
  parallel_for(jobs.size(), ws.config().workers, [&](std::size_t i, int) {
    ResultRow r = jobs[i].row;
    try {
      jobs[i].run(r);
    } catch (const std::exception& e) {
      r.status = std::string("failed: ") + e.what();
      r.rel_err_pct = r.rel_err_std_pct = r.sq_err = std::nan("");
    }
    char buf[256];
    std::snprintf(buf, sizeof buf, "[%s] %s d=%d n=%zu sigma=%g grid=%zu r=%d: rel %.4g%% sq %.4g (%.1f s)%s",
                  r.sweep.c_str(), r.method.c_str(), r.reduced_dim, r.n_train, r.sigma,
                  r.test_grid, r.repeat, r.rel_err_pct, r.sq_err, r.wallclock_s,
                  r.ok() ? "" : (" " + r.status).c_str());
    ws.log(buf);
    rows[i] = std::move(r);
  });
  return rows;
}

ResultRow base_row(const Workspace& ws, const std::string& sweep, const std::string& method,
                   int d, std::size_t n, double sigma, int repeat) {
  ResultRow r;
  r.sweep = sweep;
  r.method = method;
  r.family = std::string(to_string(ws.config().family));
  r.reduced_dim = d;
  r.n_train = n;
  r.sigma = sigma;
  r.test_grid = ws.config().grid_in;
  r.repeat = repeat;
  r.seed = ws.repeat_seed(repeat);
  return r;
}

void fill_metrics(ResultRow& r, const TestMetrics& m) {
  r.rel_err_pct = m.rel_err_pct;
  r.rel_err_std_pct = m.rel_err_std_pct;
  r.sq_err = m.sq_err;
}

Job evaluation_job(Workspace& ws, const std::string& sweep, Method method, int d, std::size_t n,
                   double sigma, int repeat) {
  Job j;
  j.row = base_row(ws, sweep, std::string(to_string(method)), d, n, sigma, repeat);
  j.run = [&ws, method, d, n, sigma, repeat](ResultRow& r) {
    const auto tm = ws.model(method, d, n, sigma, repeat);
    r.wallclock_s = tm.wallclock_s;
    fill_metrics(r, evaluate(*tm.model, ws.dataset().test, ws.rule_out()));
  };
  return j;
}

Table fit_table(const LineFit& f) {
  return {{"slope", "intercept", "r2", "defined"},
          {{f.slope, f.intercept, f.r2, f.defined ? 1.0 : 0.0}}};
}

}  // namespace

SweepResult run_dim_sweep(Workspace& ws) {
  const auto& c = ws.config();
  ws.dataset();
  std::vector<Job> jobs;
  for (Method m : c.methods)
    for (int d : c.reduced_dims)
      for (int r = 0; r < c.repeats; ++r)
        jobs.push_back(evaluation_job(ws, "dims", m, d, c.n_train, c.noise_sigma, r));
  SweepResult out{"dims", run_jobs(ws, std::move(jobs)), {}, {}};
  out.summary = summarize(out.rows);
  return out;
}

SweepResult run_sample_complexity(Workspace& ws) {
  const auto& c = ws.config();
  ws.dataset();
  std::vector<Job> jobs;
  for (std::size_t n : c.n_sweep)
    for (int r = 0; r < c.repeats; ++r)
      jobs.push_back(evaluation_job(ws, "sample_complexity", Method::aenet, c.sweep_dim, n,
                                    c.noise_sigma, r));
  SweepResult out{"sample_complexity", run_jobs(ws, std::move(jobs)), {}, {}};
  out.summary = summarize(out.rows);
  std::vector<double> x, y;
  for (const auto& cell : out.summary) {
    if (cell.runs > 0 && cell.sq_err_mean > 0) {
      x.push_back(static_cast<double>(cell.n_train));
      y.push_back(cell.sq_err_mean);
    }
  }
  out.extras["fit"] = fit_table(fit_loglog(x, y));
  return out;
}

SweepResult run_noise_sweep(Workspace& ws) {
  const auto& c = ws.config();
  ws.dataset();
  std::vector<Job> jobs;
  for (double s : c.sigmas)
    for (int r = 0; r < c.repeats; ++r)
      jobs.push_back(evaluation_job(ws, "noise", Method::aenet, c.sweep_dim, c.n_train, s, r));
  SweepResult out{"noise", run_jobs(ws, std::move(jobs)), {}, {}};
  out.summary = summarize(out.rows);
  std::vector<double> x, y;
  for (const auto& cell : out.summary) {
    if (cell.runs > 0) {
      x.push_back(cell.sigma * cell.sigma);
      y.push_back(cell.sq_err_mean);
    }
  }
  out.extras["fit"] = fit_table(fit_line(x, y));
  return out;
}

SweepResult run_grid_transfer(Workspace& ws) {
  const auto& c = ws.config();
  const auto& test = ws.dataset().test;
  std::vector<Grid1D> grids;
  std::vector<Eigen::MatrixXd> inputs;
  for (std::size_t g : c.test_grids) {
    grids.push_back(default_grid(c.family, g));
    inputs.push_back(g == c.grid_in ? test.inputs : resample_inputs(test, grids.back()));
  }
  std::vector<Job> jobs;
  for (int r = 0; r < c.repeats; ++r) {
    for (std::size_t gi = 0; gi < grids.size(); ++gi) {
      Job j;
      j.row = base_row(ws, "grid_transfer", "aenet", c.sweep_dim, c.n_train, c.noise_sigma, r);
      j.row.test_grid = c.test_grids[gi];
      j.run = [&ws, &grids, &inputs, &test, gi, r](ResultRow& row) {
        const auto& cc = ws.config();
        const auto tm = ws.model(Method::aenet, cc.sweep_dim, cc.n_train, cc.noise_sigma, r);
        row.wallclock_s = tm.wallclock_s;
        const Eigen::MatrixXd pred =
            predict_on_foreign_grid(*tm.model, inputs[gi], grids[gi], cc.transfer_interp);
        fill_metrics(row, evaluate(pred, test.clean_outputs, ws.rule_out()));
      };
      jobs.push_back(std::move(j));
    }
  }
  SweepResult out{"grid_transfer", run_jobs(ws, std::move(jobs)), {}, {}};
  out.summary = summarize(out.rows);

  // native-grid reference for the plateau ratio
  Table ratio{{"test_grid", "sq_err_ratio_to_native"}, {}};
  std::vector<double> native;
  for (int r = 0; r < c.repeats; ++r) {
    try {
      const auto tm = ws.model(Method::aenet, c.sweep_dim, c.n_train, c.noise_sigma, r);
      native.push_back(evaluate(*tm.model, test, ws.rule_out()).sq_err);
    } catch (const std::exception&) {
    }
  }
  const double native_mean = mean_of(native);
  for (const auto& cell : out.summary) {
    ratio.rows.push_back({static_cast<double>(cell.test_grid),
                          native_mean > 0 ? cell.sq_err_mean / native_mean : std::nan("")});
  }
  out.extras["ratio"] = ratio;
  out.extras["native"] = Table{{"sq_err_mean"}, {{native_mean}}};
  return out;
}

SweepResult run_projection_comparison(Workspace& ws) {
  const auto& c = ws.config();
  const auto& data = ws.dataset();
  const FunctionPairDataset train = ws.training_set(c.n_train, 0.0);
  const Eigen::MatrixXd& test_inputs = data.test.inputs;
  auto sq_of = [&](const Eigen::MatrixXd& recon) {
    Eigen::Map<const Eigen::VectorXd> w(ws.rule_in().weights().data(), test_inputs.cols());
    return ((recon - test_inputs).array().square().matrix() * w).mean();
  };

  const int max_pca = static_cast<int>(std::min<Eigen::Index>(train.inputs.rows(), train.inputs.cols()));
  std::vector<Job> jobs;
  for (int d : c.reduced_dims) {
    Job j;
    j.row = base_row(ws, "projection", "pca", d, c.n_train, 0.0, 0);
    j.run = [&, d](ResultRow& r) {
      if (d > max_pca) {
        throw ConfigError("PCA dimension " + std::to_string(d) + " exceeds min(n, D) = " +
                          std::to_string(max_pca));
      }
      const auto t0 = Clock::now();
      const PcaModel m = fit_pca(train.inputs, d);
      r.wallclock_s = seconds_since(t0);
      const auto pe = projection_error(m, test_inputs, ws.rule_in());
      r.rel_err_pct = 100.0 * pe.mean;
      r.rel_err_std_pct = 100.0 * pe.stddev;
      r.sq_err = sq_of(m.reconstruct(test_inputs));
    };
    jobs.push_back(std::move(j));
    for (int rep = 0; rep < c.repeats; ++rep) {
      Job a;
      a.row = base_row(ws, "projection", "autoencoder", d, c.n_train, 0.0, rep);
      a.run = [&, d, rep](ResultRow& r) {
        const AutoEncoder ae = ws.autoencoder(d, c.n_train, rep, &r.wallclock_s);
        const auto pe = projection_error(ae, test_inputs, ws.rule_in());
        r.rel_err_pct = 100.0 * pe.mean;
        r.rel_err_std_pct = 100.0 * pe.stddev;
        r.sq_err = sq_of(ae.reconstruct(test_inputs));
      };
      jobs.push_back(std::move(a));
    }
  }
  SweepResult out{"projection", run_jobs(ws, std::move(jobs)), {}, {}};
  out.summary = summarize(out.rows);

  const PcaModel scree = fit_pca(train.inputs, 1);
  Table sv{{"index", "singular_value"}, {}};
  for (Eigen::Index k = 0; k < scree.singular_values.size(); ++k) {
    sv.rows.push_back({static_cast<double>(k + 1), scree.singular_values(k)});
  }
  out.extras["singular_values"] = sv;

  try {
    const AutoEncoder ae = ws.autoencoder(c.sweep_dim, c.n_train, 0);
    const LatentTable lt = latent_features(ae, train.inputs, train.params);
    Table lat{lt.columns, {}};
    for (Eigen::Index r = 0; r < lt.values.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(lt.values.cols()));
      for (Eigen::Index k = 0; k < lt.values.cols(); ++k) {
        row[static_cast<std::size_t>(k)] = lt.values(r, k);
      }
      lat.rows.push_back(std::move(row));
    }
    out.extras["latent"] = lat;

    // distance of each latent point from the centroid, normalized by the largest
    const Eigen::MatrixXd z = lt.values.leftCols(ae.latent_dim);
    const Eigen::RowVectorXd centre = z.colwise().mean();
    const Eigen::VectorXd radius = (z.rowwise() - centre).rowwise().norm();
    const double rmax = radius.maxCoeff();
    constexpr int kBins = 20;
    Table hist{{"radius_lo", "radius_hi", "count"}, {}};
    std::vector<double> counts(kBins, 0.0);
    for (Eigen::Index i = 0; i < radius.size(); ++i) {
      const int b = rmax > 0 ? std::min(kBins - 1, static_cast<int>(radius(i) / rmax * kBins)) : 0;
      counts[static_cast<std::size_t>(b)] += 1.0;
    }
    for (int b = 0; b < kBins; ++b) {
      hist.rows.push_back({static_cast<double>(b) / kBins, static_cast<double>(b + 1) / kBins,
                           counts[static_cast<std::size_t>(b)]});
    }
    out.extras["latent_radial"] = hist;
  } catch (const std::exception& e) {
    ws.log(std::string("latent export skipped: ") + e.what());
  }
  return out;
}

std::string_view to_string(SweepKind k) {
  switch (k) {
    case SweepKind::dims: return "dims";
    case SweepKind::sample_complexity: return "sample_complexity";
    case SweepKind::noise: return "noise";
    case SweepKind::grid_transfer: return "grid_transfer";
    case SweepKind::projection: return "projection";
  }
  return "?";
}

SweepKind sweep_kind_from_string(std::string_view s) {
  for (SweepKind k : {SweepKind::dims, SweepKind::sample_complexity, SweepKind::noise,
                      SweepKind::grid_transfer, SweepKind::projection}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown sweep '" + std::string(s) + "'");
}

SweepResult run_sweep(Workspace& ws, SweepKind kind) {
  switch (kind) {
    case SweepKind::dims: return run_dim_sweep(ws);
    case SweepKind::sample_complexity: return run_sample_complexity(ws);
    case SweepKind::noise: return run_noise_sweep(ws);
    case SweepKind::grid_transfer: return run_grid_transfer(ws);
    case SweepKind::projection: return run_projection_comparison(ws);
  }
  throw ConfigError("unknown sweep");
}

}  // namespace aenet
