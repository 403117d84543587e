#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aenet/emit.hpp"
#include "aenet/errors.hpp"
#include "aenet/experiments.hpp"

using namespace aenet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("aenet_exp_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ExperimentConfig tiny(const fs::path& out) {
  ExperimentConfig c = parse_config(
      "desk_scale = true\n"
      "grid_in = 64\ngrid_out = 64\n"
      "n_train = 80\nn_test = 30\n"
      "n_sweep = 20, 40, 80\n"
      "test_grids = 16, 32, 64\n"
      "reduced_dims = 1, 2\n"
      "methods = aenet, pcanet, deeponet\n"
      "repeats = 2\n"
      "epochs = 4\nbatch_size = 16\n"
      "ae_width = 12\ngamma_width = 12\npcanet_width = 12\ndeeponet_width = 12\n"
      "pcanet_d_out = 6\n"
      "seed = 5\n");
  c.output_dir = out.string();
  c.cache_datasets = false;
  return c;
}

std::vector<double> cell_values(const SweepResult& r, bool sq) {
  std::vector<double> v;
  for (const auto& c : r.summary) v.push_back(sq ? c.sq_err_mean : c.rel_err_mean);
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config defaults follow the full-scale setup") {
  const ExperimentConfig c;
  CHECK(c.n_train == 2000);
  CHECK(c.n_test == 500);
  CHECK(c.reduced_dims == std::vector<int>{1, 2, 4, 6, 8, 10, 20, 40, 100});
  CHECK(c.repeats == 3);
  CHECK(c.epochs == 500);
  CHECK(c.batch_size == 64);
  CHECK(c.learning_rate == 1e-3);
  CHECK(c.ae_width == 500);
  CHECK(c.grid_in == 512);
  CHECK_NOTHROW(c.validate());
  CHECK(parse_config("").to_text() == c.to_text());
}

TEST_CASE("desk scale shrinks sizes unless keys are given") {
  const auto d = parse_config("desk_scale = true");
  CHECK(d.ae_width == 64);
  CHECK(d.gamma_width == 64);
  CHECK(d.pcanet_width == 64);
  CHECK(d.deeponet_width == 64);
  CHECK(d.epochs == 200);
  CHECK(d.n_train == 500);
  CHECK(d.grid_in == 256);
  CHECK(d.grid_out == 256);
  // metric-relevant settings are untouched
  CHECK(d.quadrature == ExperimentConfig{}.quadrature);
  CHECK(d.reduced_dims == ExperimentConfig{}.reduced_dims);

  const auto e = parse_config("epochs = 7\ndesk_scale = true\nae_width = 33");
  CHECK(e.epochs == 7);
  CHECK(e.ae_width == 33);
  CHECK(e.gamma_width == 64);
}

TEST_CASE("config text parsing") {
  SUBCASE("comments, whitespace and lists") {
    const auto c = parse_config(
        "# header\n\n  family =  burgers  # trailing\nreduced_dims=3,  5,7\n"
        "methods = pcanet\nsigmas = 0, 0.25\nseed = 12\n");
    CHECK(c.family == Family::burgers);
    CHECK(c.reduced_dims == std::vector<int>{3, 5, 7});
    CHECK(c.methods == std::vector<Method>{Method::pcanet});
    CHECK(c.sigmas == std::vector<double>{0.0, 0.25});
    CHECK(c.seed == 12);
  }
  SUBCASE("round trip through the canonical text") {
    auto c = parse_config("family = kdv\nsigmas = 0, 0.1\nlearning_rate = 0.0003\nworkers = 3\n"
                          "quadrature = simpson\ntransfer_interp = linear\nsplit_stages = true");
    c.output_dir = "some/where";
    const auto again = parse_config(c.to_text());
    CHECK(again.to_text() == c.to_text());
    CHECK(again.learning_rate == 0.0003);
    CHECK(again.output_dir == "some/where");
    CHECK(again.quadrature == QuadratureKind::simpson);
  }
  SUBCASE("overrides") {
    ConfigMap kv = parse_config_text("epochs = 10\n");
    apply_override(kv, "epochs=20");
    apply_override(kv, " repeats = 1 ");
    const auto c = build_config(kv);
    CHECK(c.epochs == 20);
    CHECK(c.repeats == 1);
    CHECK_THROWS_AS(apply_override(kv, "no_equals_sign"), ConfigError);
    CHECK_THROWS_AS(apply_override(kv, "=5"), ConfigError);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(parse_config("nonsense = 1"), ConfigError);
    CHECK_THROWS_AS(parse_config("schema_version = 2"), ConfigError);
    CHECK_THROWS_AS(parse_config("epochs = ten"), ConfigError);
    CHECK_THROWS_AS(parse_config("reduced_dims ="), ConfigError);
    CHECK_THROWS_AS(parse_config("reduced_dims = 0, 2"), ConfigError);
    CHECK_THROWS_AS(parse_config("repeats = 0"), ConfigError);
    CHECK_THROWS_AS(parse_config("sigmas = -0.1"), ConfigError);
    CHECK_THROWS_AS(parse_config("family = heat"), ConfigError);
    CHECK_THROWS_AS(parse_config("methods = aenet, fno"), ConfigError);
    CHECK_THROWS_AS(parse_config("just a line"), ConfigError);
    CHECK_THROWS_AS(read_config_file("/nonexistent/aenet.cfg"), Error);
  }
  SUBCASE("fingerprint") {
    const auto a = parse_config("seed = 1");
    auto b = a;
    b.output_dir = "elsewhere";
    b.workers = 4;
    b.cache_models = true;
    CHECK(a.fingerprint() == b.fingerprint());
    CHECK(a.fingerprint().size() == 16);
    CHECK(a.fingerprint() != parse_config("seed = 2").fingerprint());
    CHECK(a.fingerprint() != parse_config("seed = 1\nepochs = 499").fingerprint());
  }
  SUBCASE("schema lists every canonical key") {
    const std::string text = ExperimentConfig{}.to_text();
    for (const auto& [key, help] : config_schema()) {
      CHECK_MESSAGE(text.find(key + " = ") != std::string::npos, key);
      CHECK_FALSE(help.empty());
    }
  }
}

TEST_CASE("line fits") {
  const auto f = fit_line({0, 1, 2, 3}, {3, 1, -1, -3});
  CHECK(f.defined);
  CHECK(f.slope == doctest::Approx(-2).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(3).epsilon(1e-14));
  CHECK(f.r2 == doctest::Approx(1).epsilon(1e-14));

  const auto noisy = fit_line({0, 1, 2, 3}, {0, 1.2, 1.8, 3.1});
  // oracle: closed-form normal equations
  const double sx = 6, sy = 6.1, sxx = 14, sxy = 0 + 1.2 + 3.6 + 9.3;
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  CHECK(noisy.slope == doctest::Approx(slope).epsilon(1e-12));
  CHECK(noisy.intercept == doctest::Approx((sy - slope * sx) / 4).epsilon(1e-12));
  CHECK(noisy.r2 < 1.0);
  CHECK(noisy.r2 > 0.95);

  CHECK_FALSE(fit_line({2}, {1}).defined);
  CHECK_FALSE(fit_line({2, 2, 2}, {1, 2, 3}).defined);
  CHECK_THROWS_AS(fit_line({1, 2}, {1}), DimensionError);

  const auto ll = fit_loglog({125, 250, 500, 1000}, {8, 4, 2, 1});
  CHECK(ll.slope == doctest::Approx(-1).epsilon(1e-12));
  CHECK(ll.r2 == doctest::Approx(1).epsilon(1e-12));
  CHECK_THROWS_AS(fit_loglog({1, 2}, {0, 1}), ConfigError);
}

TEST_CASE("monotone within bands") {
  CHECK(monotone_within_bands({1, 2, 3}, {0, 0, 0}, true));
  CHECK_FALSE(monotone_within_bands({1, 2, 3}, {0, 0, 0}, false));
  CHECK(monotone_within_bands({1, 0.9, 3}, {0.05, 0.05, 0.1}, true));
  CHECK_FALSE(monotone_within_bands({1, 0.8, 3}, {0.05, 0.05, 0.1}, true));
  CHECK(monotone_within_bands({5}, {0}, true));
  CHECK(monotone_within_bands({}, {}, false));
  CHECK_THROWS_AS(monotone_within_bands({1, 2}, {0}, true), DimensionError);
}

TEST_CASE("summaries use the sample standard deviation over successful runs") {
  std::vector<ResultRow> rows(5);
  for (auto& r : rows) {
    r.sweep = "dims";
    r.method = "aenet";
    r.family = "transport";
    r.reduced_dim = 2;
  }
  rows[0].rel_err_pct = 1;
  rows[1].rel_err_pct = 2;
  rows[2].rel_err_pct = 6;
  rows[0].sq_err = 0.5;
  rows[1].sq_err = 0.5;
  rows[2].sq_err = 0.5;
  rows[3].status = "failed: boom";
  rows[3].rel_err_pct = std::nan("");
  rows[4].reduced_dim = 4;
  rows[4].status = "failed: boom";
  const auto cells = summarize(rows);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].runs == 3);
  CHECK(cells[0].failed == 1);
  CHECK(cells[0].rel_err_mean == doctest::Approx(3));
  CHECK(cells[0].rel_err_std == doctest::Approx(std::sqrt(7.0)));
  CHECK(cells[0].sq_err_std == 0.0);
  CHECK(cells[1].runs == 0);
  CHECK(cells[1].failed == 1);
  CHECK(std::isnan(cells[1].rel_err_mean));
  CHECK(summarize({}).empty());
}

TEST_CASE("CSV and JSON exports") {
  const Provenance prov{"00ff00ff00ff00ff", 9, true};
  ResultRow a;
  a.sweep = "dims";
  a.method = "aenet";
  a.family = "burgers";
  a.reduced_dim = 4;
  a.n_train = 2000;
  a.sigma = 0.1;
  a.test_grid = 512;
  a.repeat = 2;
  a.seed = 11;
  a.rel_err_pct = 1.0 / 3.0;
  a.rel_err_std_pct = 0.1234567890123456789;
  a.sq_err = 1e-17 * M_PI;
  a.wallclock_s = 12.5;
  ResultRow b = a;
  b.method = "pcanet";
  b.status = "failed: shape \"3, 4\" mismatch, again";
  b.rel_err_pct = b.sq_err = b.rel_err_std_pct = std::nan("");

  SUBCASE("results round trip exactly") {
    std::stringstream ss;
    write_results_csv(ss, {a, b}, prov);
    CHECK(ss.str().rfind("# config=00ff00ff00ff00ff seed=9 scale=desk\n", 0) == 0);
    const auto back = read_results_csv(ss);
    REQUIRE(back.size() == 2);
    CHECK(same_metrics(back, {a, b}));
    CHECK(back[0].wallclock_s == a.wallclock_s);
    CHECK(back[1].status == b.status);
  }
  SUBCASE("empty results give a header-only file") {
    std::stringstream ss;
    write_results_csv(ss, {}, prov);
    int lines = 0;
    for (std::string l; std::getline(ss, l);) ++lines;
    CHECK(lines == 2);
    ss.clear();
    ss.seekg(0);
    CHECK(read_results_csv(ss).empty());
  }
  SUBCASE("summary round trip") {
    const auto cells = summarize({a, b, a});
    std::stringstream ss;
    write_summary_csv(ss, cells, prov);
    const auto back = read_summary_csv(ss);
    REQUIRE(back.size() == cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      CHECK(back[i].method == cells[i].method);
      CHECK(back[i].runs == cells[i].runs);
      CHECK(back[i].failed == cells[i].failed);
      CHECK(back[i].sigma == cells[i].sigma);
      CHECK((back[i].rel_err_mean == cells[i].rel_err_mean ||
             (std::isnan(back[i].rel_err_mean) && std::isnan(cells[i].rel_err_mean))));
      CHECK(back[i].sq_err_std == cells[i].sq_err_std);
    }
  }
  SUBCASE("numeric table round trip") {
    Table t{{"index", "value"}, {{1, 0.1}, {2, 1e300}, {3, -4.9406564584124654e-324}}};
    std::stringstream ss;
    write_table_csv(ss, t, prov);
    const auto back = read_table_csv(ss);
    CHECK(back.columns == t.columns);
    CHECK(back.rows == t.rows);
    Table bad{{"a"}, {{1, 2}}};
    CHECK_THROWS_AS(write_table_csv(ss, bad, prov), DimensionError);
  }
  SUBCASE("malformed input") {
    std::stringstream wrong_header("a,b\n1,2\n");
    CHECK_THROWS_AS(read_results_csv(wrong_header), IoError);
    std::stringstream empty("# only a comment\n");
    CHECK_THROWS_AS(read_table_csv(empty), IoError);
    std::stringstream short_row("x,y\n1\n");
    CHECK_THROWS_AS(read_table_csv(short_row), IoError);
  }
  SUBCASE("comparison table has one row per method and one column per dimension") {
    ResultRow c = a;
    c.reduced_dim = 1;
    c.rel_err_pct = 12.14;
    std::stringstream ss;
    write_comparison_table(ss, summarize({a, c, b}), prov);
    std::string line;
    std::getline(ss, line);
    CHECK(line[0] == '#');
    std::getline(ss, line);
    CHECK(line == "method,1,4");
    std::getline(ss, line);
    CHECK(line == "aenet,12.1 (0.0),0.3 (0.0)");
    std::getline(ss, line);
    CHECK(line == "pcanet,-,failed");
  }
  SUBCASE("json carries rows, summary and provenance") {
    SweepResult r{"dims", {a, b}, summarize({a, b}), {}};
    r.extras["fit"] = Table{{"slope"}, {{-0.5}}};
    ExperimentConfig cfg;
    cfg.seed = 9;
    std::stringstream ss;
    write_json(ss, r, cfg);
    const auto j = nlohmann::json::parse(ss.str());
    CHECK(j["sweep"] == "dims");
    CHECK(j["config_fingerprint"] == cfg.fingerprint());
    CHECK(j["seed"] == 9);
    CHECK(j["rows"].size() == 2);
    CHECK(j["rows"][1]["rel_err_pct"].is_null());
    CHECK(j["summary"].size() == 2);
    CHECK(j["extras"]["fit"]["rows"][0][0] == -0.5);
  }
  SUBCASE("svg plot") {
    std::stringstream ss;
    write_svg_plot(ss, {"t <1>", "x", "y", true, true, false},
                   {{"s", {1, 10, 100}, {1e-3, 1e-2, 0.0}, {1e-4, 1e-3, 0}, {}}}, prov);
    const std::string s = ss.str();
    CHECK(s.rfind("<svg", 0) == 0);
    CHECK(s.find("</svg>") != std::string::npos);
    CHECK(s.find("t &lt;1&gt;") != std::string::npos);
    CHECK(s.find("config=00ff00ff00ff00ff") != std::string::npos);
    CHECK(s.find("nan") == std::string::npos);
    CHECK(s.find("inf") == std::string::npos);
  }
}

TEST_CASE("sweep kinds") {
  for (auto k : {SweepKind::dims, SweepKind::sample_complexity, SweepKind::noise,
                 SweepKind::grid_transfer, SweepKind::projection}) {
    CHECK(sweep_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(sweep_kind_from_string("everything"), ConfigError);
}

TEST_CASE("workspace data and noise") {
  TempDir tmp;
  auto cfg = tiny(tmp.path);
  cfg.cache_datasets = true;
  Workspace ws(cfg);
  const auto& data = ws.dataset();
  CHECK(data.train.size() == 80);
  CHECK(data.test.size() == 30);
  CHECK(data.train.grid_in.size() == 64);

  Workspace again(cfg);
  CHECK(again.dataset().train.inputs == data.train.inputs);
  CHECK(again.dataset().test.clean_outputs == data.test.clean_outputs);
  CHECK(fs::exists(tmp.path / "datasets"));

  const auto big = ws.training_set(80, 0.3);
  const auto small = ws.training_set(40, 0.3);
  CHECK(small.noisy_outputs == big.noisy_outputs.topRows(40));
  CHECK(small.clean_outputs == data.train.clean_outputs.topRows(40));
  CHECK(small.noisy_outputs != small.clean_outputs);
  CHECK(ws.training_set(40, 0.0).noisy_outputs == small.clean_outputs);
  CHECK_THROWS_AS(ws.training_set(81, 0.0), ConfigError);
  CHECK(ws.repeat_seed(0) == 5);
  CHECK(ws.repeat_seed(2) == 7);
}

TEST_CASE("dimension sweep is deterministic and isolates failures") {
  TempDir tmp;
  auto cfg = tiny(tmp.path);
  Workspace ws1(cfg);
  const auto r1 = run_dim_sweep(ws1);
  REQUIRE(r1.rows.size() == 3 * 2 * 2);
  CHECK_FALSE(r1.any_failed());
  CHECK(r1.summary.size() == 6);
  for (const auto& row : r1.rows) {
    CHECK(std::isfinite(row.rel_err_pct));
    CHECK(row.rel_err_std_pct >= 0);
    CHECK(row.seed == 5 + static_cast<std::uint64_t>(row.repeat));
  }
  // different repeats use different seeds
  CHECK(r1.rows[0].rel_err_pct != r1.rows[1].rel_err_pct);

  auto cfg2 = cfg;
  cfg2.workers = 2;
  Workspace ws2(cfg2);
  const auto r2 = run_dim_sweep(ws2);
  CHECK(same_metrics(r1.rows, r2.rows));

  // a PCA dimension above the grid size fails only its own cells
  auto bad = cfg;
  bad.reduced_dims = {1, 2, 500};
  Workspace ws3(bad);
  const auto r3 = run_dim_sweep(ws3);
  CHECK(r3.any_failed());
  int failed = 0;
  for (const auto& row : r3.rows) {
    if (row.ok()) {
      auto it = std::find_if(r1.rows.begin(), r1.rows.end(), [&](const ResultRow& o) {
        return o.method == row.method && o.reduced_dim == row.reduced_dim &&
               o.repeat == row.repeat;
      });
      if (it != r1.rows.end()) CHECK(it->rel_err_pct == row.rel_err_pct);
    } else {
      ++failed;
      CHECK(row.method == "pcanet");
      CHECK(row.reduced_dim == 500);
      CHECK(row.status.rfind("failed: ", 0) == 0);
    }
  }
  CHECK(failed == 2);
}

TEST_CASE("noise, sample-size and grid sweeps share the dimension-sweep baseline") {
  TempDir tmp;
  auto cfg = tiny(tmp.path);
  cfg.methods = {Method::aenet};
  cfg.reduced_dims = {2};
  cfg.sigmas = {0.0, 0.5};
  cfg.repeats = 1;

  Workspace a(cfg);
  const auto dims = run_dim_sweep(a);
  Workspace b(cfg);
  const auto noise = run_noise_sweep(b);
  Workspace c(cfg);
  const auto grid = run_grid_transfer(c);
  Workspace d(cfg);
  const auto n = run_sample_complexity(d);

  REQUIRE(dims.rows.size() == 1);
  REQUIRE(noise.rows.size() == 2);
  CHECK(noise.rows[0].sigma == 0.0);
  CHECK(noise.rows[0].sq_err == dims.rows[0].sq_err);
  CHECK(noise.rows[0].rel_err_pct == dims.rows[0].rel_err_pct);
  CHECK(noise.rows[1].sq_err != dims.rows[0].sq_err);
  REQUIRE(noise.extras.count("fit"));
  CHECK(noise.extras.at("fit").rows[0][3] == 1.0);

  REQUIRE(grid.rows.size() == 3);
  CHECK(grid.rows[2].test_grid == 64);
  CHECK(grid.rows[2].sq_err == dims.rows[0].sq_err);
  CHECK(grid.extras.at("native").rows[0][0] == dims.rows[0].sq_err);
  CHECK(grid.extras.at("ratio").rows[2][1] == 1.0);

  REQUIRE(n.rows.size() == 3);
  CHECK(n.rows[2].n_train == 80);
  CHECK(n.rows[2].sq_err == dims.rows[0].sq_err);
  CHECK(n.extras.at("fit").rows[0][3] == 1.0);

  auto single = cfg;
  single.n_sweep = {40};
  Workspace e(single);
  const auto one = run_sample_complexity(e);
  CHECK(one.extras.at("fit").rows[0][3] == 0.0);
}

TEST_CASE("model cache reproduces metrics") {
  TempDir tmp;
  auto cfg = tiny(tmp.path);
  cfg.methods = {Method::aenet, Method::deeponet};
  cfg.reduced_dims = {2};
  cfg.repeats = 1;
  cfg.cache_models = true;
  Workspace a(cfg);
  const auto first = run_dim_sweep(a);
  CHECK(fs::exists(tmp.path / "models"));
  std::vector<std::string> logs;
  Workspace b(cfg, [&](const std::string& m) { logs.push_back(m); });
  const auto second = run_dim_sweep(b);
  CHECK(same_metrics(first.rows, second.rows));
  CHECK(std::count_if(logs.begin(), logs.end(), [](const std::string& m) {
          return m.find("loaded cached model") != std::string::npos;
        }) == 2);
}

TEST_CASE("projection comparison") {
  TempDir tmp;
  auto cfg = tiny(tmp.path);
  cfg.reduced_dims = {1, 2, 4, 8, 64};
  cfg.repeats = 1;
  Workspace ws(cfg);
  const auto r = run_projection_comparison(ws);
  CHECK_FALSE(r.any_failed());
  std::vector<double> pca;
  for (const auto& c : r.summary) {
    if (c.method == "pca") pca.push_back(c.rel_err_mean);
  }
  REQUIRE(pca.size() == 5);
  for (std::size_t i = 0; i + 1 < pca.size(); ++i) CHECK(pca[i + 1] <= pca[i] + 1e-12);
  CHECK(pca.back() < 1e-10);

  const auto& sv = r.extras.at("singular_values");
  CHECK(sv.rows.size() == 64);
  for (std::size_t i = 0; i + 1 < sv.rows.size(); ++i) CHECK(sv.rows[i + 1][1] <= sv.rows[i][1]);

  const auto& lat = r.extras.at("latent");
  CHECK(lat.rows.size() == 80);
  REQUIRE(lat.columns.size() == 4);
  CHECK(lat.columns[2] == "a");
  CHECK(lat.columns[3] == "h");
  double counted = 0;
  for (const auto& row : r.extras.at("latent_radial").rows) counted += row[2];
  CHECK(counted == 80);

  auto over = cfg;
  over.reduced_dims = {65};
  Workspace ws2(over);
  const auto r2 = run_projection_comparison(ws2);
  CHECK(r2.any_failed());
  CHECK(r2.rows[0].method == "pca");
  CHECK_FALSE(r2.rows[0].ok());
  CHECK(r2.rows[1].ok());
}

TEST_CASE("emitted files and re-rendered plots") {
  TempDir tmp;
  auto cfg = tiny(tmp.path);
  cfg.reduced_dims = {2};
  cfg.repeats = 1;
  Workspace ws(cfg);
  const auto proj = run_projection_comparison(ws);
  const auto files = emit_outputs(proj, cfg);
  for (const auto& f : files) CHECK_MESSAGE(fs::exists(f), f.string());
  const auto tables = tmp.path / "tables";
  const auto series = tmp.path / "series";
  CHECK(fs::exists(tables / "projection_runs.csv"));
  CHECK(fs::exists(tables / "projection_summary.csv"));
  CHECK(fs::exists(tables / "projection_table.csv"));
  CHECK(fs::exists(tables / "projection.json"));
  CHECK(fs::exists(series / "projection_latent.csv"));
  CHECK(fs::exists(series / "latent_by_a.svg"));
  CHECK(fs::exists(series / "latent_by_h.svg"));
  CHECK(fs::exists(series / "singular_values.svg"));
  const std::string fp = "config=" + cfg.fingerprint();
  CHECK(slurp(tables / "projection_runs.csv").find(fp) != std::string::npos);
  CHECK(slurp(series / "latent_by_a.svg").find(fp) != std::string::npos);

  std::ifstream in(tables / "projection_runs.csv");
  CHECK(same_metrics(read_results_csv(in), proj.rows));

  const std::string before = slurp(series / "latent_by_h.svg");
  fs::remove(series / "latent_by_h.svg");
  const auto redrawn = render_plots_from_files(tmp.path, "projection");
  CHECK(redrawn.size() == 4);
  CHECK(slurp(series / "latent_by_h.svg") == before);
  CHECK_THROWS_AS(render_plots_from_files(tmp.path, "noise"), IoError);
}
