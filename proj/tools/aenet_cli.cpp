#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aenet/emit.hpp"
#include "aenet/errors.hpp"
#include "aenet/experiments.hpp"

namespace fs = std::filesystem;
using namespace aenet;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "key = value config file");
  cmd->add_option("-s,--set", c.overrides, "override, key=value (repeatable)");
  cmd->add_flag("-q,--quiet", c.quiet, "no progress log on stderr");
}

ExperimentConfig load(const Common& c) {
  ConfigMap kv;
  if (!c.config_path.empty()) kv = read_config_file(c.config_path);
  for (const auto& o : c.overrides) apply_override(kv, o);
  return build_config(kv);
}

LogFn logger(const Common& c) {
  if (c.quiet) return {};
  return [](const std::string& msg) { std::cerr << msg << std::endl; };
}

int run_sweep_verb(const Common& c, SweepKind kind, bool json, bool svg) {
  const ExperimentConfig cfg = load(c);
  Workspace ws(cfg, logger(c));
  const SweepResult r = run_sweep(ws, kind);
  for (const auto& p : emit_outputs(r, cfg, {true, json, svg})) std::cout << p.string() << "\n";
  for (const auto& cell : r.summary) {
    std::printf("%-9s d=%-3d n=%-5zu sigma=%-5g grid=%-4zu  rel %8.3f%% (%.3f)  sq %.4g  [%d ok, %d failed]\n",
                cell.method.c_str(), cell.reduced_dim, cell.n_train, cell.sigma, cell.test_grid,
                cell.rel_err_mean, cell.rel_err_std, cell.sq_err_mean, cell.runs, cell.failed);
  }
  if (auto it = r.extras.find("fit"); it != r.extras.end()) {
    const auto& t = it->second;
    for (const auto& row : t.rows) {
      std::printf("fit:");
      for (std::size_t k = 0; k < row.size(); ++k) {
        std::printf(" %s=%.6g", t.columns[k].c_str(), row[k]);
      }
      std::printf("\n");
    }
  }
  return r.any_failed() ? 2 : 0;
}

fs::path model_path(const ExperimentConfig& cfg, Method m, int d, std::size_t n, int repeat) {
  return fs::path(cfg.output_dir) / "models" /
         (std::string(to_string(m)) + "_" + std::string(to_string(cfg.family)) + "_d" +
          std::to_string(d) + "_n" + std::to_string(n) + "_r" + std::to_string(repeat) + ".bin");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aenet: operator learning with autoencoder, PCA and DeepONet surrogates"};
  app.require_subcommand(1);

  Common common;
  bool no_json = false, no_svg = false;

  auto* gen = app.add_subcommand("generate-data", "generate and cache the train/test split");
  add_common(gen, common);
  std::string csv_out;
  gen->add_option("--csv", csv_out, "also export the test split as CSV to this path");

  auto* train = app.add_subcommand("train", "train one model and save it");
  add_common(train, common);
  std::string method_name = "aenet";
  int dim = 2, repeat = 0;
  double sigma = 0.0;
  std::string out_path;
  train->add_option("-m,--method", method_name, "aenet, pcanet or deeponet");
  train->add_option("-d,--dim", dim, "reduced dimension");
  train->add_option("-r,--repeat", repeat, "repeat index (model seed = seed + repeat)");
  train->add_option("--sigma", sigma, "output noise level");
  train->add_option("-o,--out", out_path, "model file (default under output_dir/models)");

  auto* eval = app.add_subcommand("evaluate", "evaluate a saved model on the test split");
  add_common(eval, common);
  std::string model_file;
  std::size_t test_grid = 0;
  eval->add_option("model", model_file, "model file")->required();
  eval->add_option("--grid", test_grid, "regenerate the test inputs on this grid size");

  struct SweepVerb {
    const char* name;
    const char* help;
    SweepKind kind;
    CLI::App* cmd = nullptr;
  };
  std::vector<SweepVerb> sweeps{
      {"sweep-dims", "relative test error per method and reduced dimension", SweepKind::dims},
      {"sweep-n", "squared test error versus training sample size", SweepKind::sample_complexity},
      {"sweep-noise", "squared test error versus output noise", SweepKind::noise},
      {"sweep-grid", "squared test error versus test grid size", SweepKind::grid_transfer},
      {"project-compare", "PCA and autoencoder projection errors", SweepKind::projection}};
  for (auto& s : sweeps) {
    s.cmd = app.add_subcommand(s.name, s.help);
    add_common(s.cmd, common);
    s.cmd->add_flag("--no-json", no_json, "skip the JSON export");
    s.cmd->add_flag("--no-svg", no_svg, "skip the plots");
  }

  auto* plots = app.add_subcommand("emit-plots", "re-render plots from emitted tables");
  std::string plot_dir = "out";
  std::vector<std::string> plot_sweeps;
  plots->add_option("-o,--output-dir", plot_dir, "output directory of earlier sweeps");
  plots->add_option("sweeps", plot_sweeps,
                    "dims, sample_complexity, noise, grid_transfer, projection (default: all found)");

  auto* schema = app.add_subcommand("config-schema", "list the config keys");

  CLI11_PARSE(app, argc, argv);

  try {
    if (schema->parsed()) {
      for (const auto& [k, help] : config_schema()) std::printf("%-22s %s\n", k.c_str(), help.c_str());
      return 0;
    }
    if (gen->parsed()) {
      const auto cfg = load(common);
      Workspace ws(cfg, logger(common));
      const auto& data = ws.dataset();
      std::printf("%zu train, %zu test samples, grids %zu -> %zu\n", data.train.size(),
                  data.test.size(), cfg.grid_in, cfg.grid_out);
      if (!csv_out.empty()) {
        std::ofstream out(csv_out);
        if (!out) throw IoError("cannot write " + csv_out);
        write_dataset_csv(out, data.test);
      }
      return 0;
    }
    if (train->parsed()) {
      const auto cfg = load(common);
      Workspace ws(cfg, logger(common));
      const Method m = method_from_string(method_name);
      const auto trained = ws.model(m, dim, cfg.n_train, sigma, repeat);
      const fs::path path = out_path.empty() ? model_path(cfg, m, dim, cfg.n_train, repeat)
                                             : fs::path(out_path);
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      std::ofstream out(path, std::ios::binary);
      if (!out) throw IoError("cannot write " + path.string());
      write_model(out, *trained.model);
      out.flush();
      if (!out) throw IoError("failed writing " + path.string());
      const auto metrics = evaluate(*trained.model, ws.dataset().test, ws.rule_out());
      std::printf("%s\ntrained in %.1f s; test rel %.4f%% (%.4f), sq %.6g\n", path.string().c_str(),
                  trained.wallclock_s, metrics.rel_err_pct, metrics.rel_err_std_pct,
                  metrics.sq_err);
      return 0;
    }
    if (eval->parsed()) {
      const auto cfg = load(common);
      Workspace ws(cfg, logger(common));
      std::ifstream in(model_file, std::ios::binary);
      if (!in) throw IoError("cannot open " + model_file);
      const auto model = read_model(in);
      const auto& test = ws.dataset().test;
      TestMetrics metrics;
      if (test_grid == 0) {
        metrics = evaluate(*model, test, ws.rule_out());
      } else {
        const Grid1D g = default_grid(cfg.family, test_grid);
        const Eigen::MatrixXd inputs = resample_inputs(test, g);
        metrics = evaluate(predict_on_foreign_grid(*model, inputs, g, cfg.transfer_interp),
                           test.clean_outputs, ws.rule_out());
      }
      std::printf("%s d=%d: rel %.4f%% (%.4f), sq %.6g, excluded %zu\n",
                  std::string(to_string(model->method())).c_str(), model->reduced_dim(),
                  metrics.rel_err_pct, metrics.rel_err_std_pct, metrics.sq_err, metrics.excluded);
      return 0;
    }
    for (const auto& s : sweeps) {
      if (s.cmd->parsed()) return run_sweep_verb(common, s.kind, !no_json, !no_svg);
    }
    if (plots->parsed()) {
      if (plot_sweeps.empty()) {
        for (auto k : {SweepKind::dims, SweepKind::sample_complexity, SweepKind::noise,
                       SweepKind::grid_transfer, SweepKind::projection}) {
          const std::string name(to_string(k));
          if (fs::exists(fs::path(plot_dir) / "tables" / (name + "_summary.csv"))) {
            plot_sweeps.push_back(name);
          }
        }
        if (plot_sweeps.empty()) throw IoError("no sweep summaries under " + plot_dir + "/tables");
      }
      for (const auto& name : plot_sweeps) {
        sweep_kind_from_string(name);
        for (const auto& p : render_plots_from_files(plot_dir, name)) std::cout << p.string() << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
