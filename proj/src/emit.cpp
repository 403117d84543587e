#include "aenet/emit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "aenet/errors.hpp"

namespace aenet {

namespace {

std::string g17(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Data lines of a CSV with the header checked against `expected`.
std::vector<std::vector<std::string>> read_csv_body(std::istream& in,
                                                    const std::vector<std::string>& expected,
                                                    std::vector<std::string>* header = nullptr) {
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto f = split_csv_line(line);
    if (!have_header) {
      if (!expected.empty() && f != expected) throw IoError("CSV header does not match");
      if (header) *header = f;
      have_header = true;
      continue;
    }
    if (header ? f.size() != header->size() : f.size() != expected.size()) {
      throw IoError("CSV row has " + std::to_string(f.size()) + " fields");
    }
    rows.push_back(std::move(f));
  }
  if (!have_header) throw IoError("CSV has no header");
  return rows;
}

double to_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw IoError("CSV field '" + s + "' is not a number");
  }
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw IoError("CSV field '" + s + "' is not an integer");
}

const std::vector<std::string> kResultColumns{
    "sweep", "method", "family", "reduced_dim", "n_train", "sigma", "test_grid", "repeat",
    "seed", "rel_err_pct", "rel_err_std_pct", "sq_err", "wallclock_s", "status"};

const std::vector<std::string> kSummaryColumns{
    "sweep", "method", "family", "reduced_dim", "n_train", "sigma", "test_grid", "runs",
    "failed", "rel_err_mean", "rel_err_std", "sq_err_mean", "sq_err_std", "wallclock_mean"};

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + csv_field(v[i]);
  return s;
}

}  // namespace

Provenance Provenance::of(const ExperimentConfig& cfg) {
  return {cfg.fingerprint(), cfg.seed, cfg.desk_scale};
}

std::string Provenance::comment() const {
  return "# config=" + config_fingerprint + " seed=" + std::to_string(seed) +
         " scale=" + (desk_scale ? "desk" : "full");
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows,
                       const Provenance& prov) {
  out << prov.comment() << "\n" << join(kResultColumns) << "\n";
  for (const auto& r : rows) {
    out << join({r.sweep, r.method, r.family, std::to_string(r.reduced_dim),
                 std::to_string(r.n_train), g17(r.sigma), std::to_string(r.test_grid),
                 std::to_string(r.repeat), std::to_string(r.seed), g17(r.rel_err_pct),
                 g17(r.rel_err_std_pct), g17(r.sq_err), g17(r.wallclock_s), r.status})
        << "\n";
  }
  if (!out) throw IoError("failed writing results CSV");
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  for (const auto& f : read_csv_body(in, kResultColumns)) {
    ResultRow r;
    r.sweep = f[0];
    r.method = f[1];
    r.family = f[2];
    r.reduced_dim = static_cast<int>(to_u64(f[3]));
    r.n_train = to_u64(f[4]);
    r.sigma = to_double(f[5]);
    r.test_grid = to_u64(f[6]);
    r.repeat = static_cast<int>(to_u64(f[7]));
    r.seed = to_u64(f[8]);
    r.rel_err_pct = to_double(f[9]);
    r.rel_err_std_pct = to_double(f[10]);
    r.sq_err = to_double(f[11]);
    r.wallclock_s = to_double(f[12]);
    r.status = f[13];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells,
                       const Provenance& prov) {
  out << prov.comment() << "\n" << join(kSummaryColumns) << "\n";
  for (const auto& c : cells) {
    out << join({c.sweep, c.method, c.family, std::to_string(c.reduced_dim),
                 std::to_string(c.n_train), g17(c.sigma), std::to_string(c.test_grid),
                 std::to_string(c.runs), std::to_string(c.failed), g17(c.rel_err_mean),
                 g17(c.rel_err_std), g17(c.sq_err_mean), g17(c.sq_err_std),
                 g17(c.wallclock_mean)})
        << "\n";
  }
  if (!out) throw IoError("failed writing summary CSV");
}

std::vector<CellSummary> read_summary_csv(std::istream& in) {
  std::vector<CellSummary> cells;
  for (const auto& f : read_csv_body(in, kSummaryColumns)) {
    CellSummary c;
    c.sweep = f[0];
    c.method = f[1];
    c.family = f[2];
    c.reduced_dim = static_cast<int>(to_u64(f[3]));
    c.n_train = to_u64(f[4]);
    c.sigma = to_double(f[5]);
    c.test_grid = to_u64(f[6]);
    c.runs = static_cast<int>(to_u64(f[7]));
    c.failed = static_cast<int>(to_u64(f[8]));
    c.rel_err_mean = to_double(f[9]);
    c.rel_err_std = to_double(f[10]);
    c.sq_err_mean = to_double(f[11]);
    c.sq_err_std = to_double(f[12]);
    c.wallclock_mean = to_double(f[13]);
    cells.push_back(std::move(c));
  }
  return cells;
}

void write_table_csv(std::ostream& out, const Table& t, const Provenance& prov) {
  out << prov.comment() << "\n" << join(t.columns) << "\n";
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) throw DimensionError("table row width mismatch");
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << g17(row[k]);
    out << "\n";
  }
  if (!out) throw IoError("failed writing table CSV");
}

Table read_table_csv(std::istream& in) {
  Table t;
  for (const auto& f : read_csv_body(in, {}, &t.columns)) {
    std::vector<double> row;
    for (const auto& s : f) row.push_back(to_double(s));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_comparison_table(std::ostream& out, const std::vector<CellSummary>& cells,
                            const Provenance& prov) {
  std::vector<int> dims;
  std::vector<std::string> methods;
  for (const auto& c : cells) {
    if (std::find(dims.begin(), dims.end(), c.reduced_dim) == dims.end()) {
      dims.push_back(c.reduced_dim);
    }
    if (std::find(methods.begin(), methods.end(), c.method) == methods.end()) {
      methods.push_back(c.method);
    }
  }
  std::sort(dims.begin(), dims.end());
  out << prov.comment() << "\nmethod";
  for (int d : dims) out << "," << d;
  out << "\n";
  for (const auto& m : methods) {
    out << m;
    for (int d : dims) {
      auto it = std::find_if(cells.begin(), cells.end(), [&](const CellSummary& c) {
        return c.method == m && c.reduced_dim == d;
      });
      char buf[64] = "-";
      if (it != cells.end() && it->runs > 0) {
        std::snprintf(buf, sizeof buf, "%.1f (%.1f)", it->rel_err_mean, it->rel_err_std);
      } else if (it != cells.end()) {
        std::snprintf(buf, sizeof buf, "failed");
      }
      out << "," << buf;
    }
    out << "\n";
  }
}

void write_json(std::ostream& out, const SweepResult& result, const ExperimentConfig& cfg) {
  using nlohmann::json;
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  json j;
  j["sweep"] = result.name;
  j["config_fingerprint"] = cfg.fingerprint();
  j["seed"] = cfg.seed;
  j["scale"] = cfg.desk_scale ? "desk" : "full";
  j["relative_error"] = "100 x mean over test samples of ||pred - v||_S / ||v||_S";
  j["config"] = cfg.to_text();
  json rows = json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"method", r.method}, {"family", r.family}, {"reduced_dim", r.reduced_dim},
                    {"n_train", r.n_train}, {"sigma", r.sigma}, {"test_grid", r.test_grid},
                    {"repeat", r.repeat}, {"seed", r.seed}, {"rel_err_pct", num(r.rel_err_pct)},
                    {"rel_err_std_pct", num(r.rel_err_std_pct)}, {"sq_err", num(r.sq_err)},
                    {"wallclock_s", r.wallclock_s}, {"status", r.status}});
  }
  j["rows"] = rows;
  json cells = json::array();
  for (const auto& c : result.summary) {
    cells.push_back({{"method", c.method}, {"family", c.family}, {"reduced_dim", c.reduced_dim},
                     {"n_train", c.n_train}, {"sigma", c.sigma}, {"test_grid", c.test_grid},
                     {"runs", c.runs}, {"failed", c.failed},
                     {"rel_err_mean", num(c.rel_err_mean)}, {"rel_err_std", num(c.rel_err_std)},
                     {"sq_err_mean", num(c.sq_err_mean)}, {"sq_err_std", num(c.sq_err_std)},
                     {"wallclock_mean", c.wallclock_mean}});
  }
  j["summary"] = cells;
  json extras = json::object();
  for (const auto& [name, t] : result.extras) {
    // large tables (latent features) stay in their CSV files
    if (t.rows.size() > 200) continue;
    json rowsj = json::array();
    for (const auto& row : t.rows) {
      json r = json::array();
      for (double v : row) r.push_back(num(v));
      rowsj.push_back(r);
    }
    extras[name] = {{"columns", t.columns}, {"rows", rowsj}};
  }
  j["extras"] = extras;
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing JSON");
}

// ---- SVG -------------------------------------------------------------------

namespace {

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  double map(double v) const {
    const double t = log ? std::log10(v) : v;
    return hi > lo ? (t - lo) / (hi - lo) : 0.5;
  }
};

Axis make_axis(const std::vector<double>& values, bool log) {
  Axis a;
  a.log = log;
  double lo = INFINITY, hi = -INFINITY;
  for (double v : values) {
    if (!std::isfinite(v) || (log && !(v > 0))) continue;
    const double t = log ? std::log10(v) : v;
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  if (!std::isfinite(lo)) {
    lo = 0;
    hi = 1;
  }
  if (log) {
    lo = std::floor(lo);
    hi = std::ceil(hi);
    if (hi == lo) hi = lo + 1;
  } else {
    if (hi == lo) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

std::vector<double> ticks(const Axis& a) {
  std::vector<double> t;
  if (a.log) {
    for (double e = a.lo; e <= a.hi + 1e-9; e += 1) t.push_back(std::pow(10.0, e));
    return t;
  }
  const double span = a.hi - a.lo;
  const double raw = span / 5;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  for (double v = std::ceil(a.lo / step) * step; v <= a.hi + 1e-12; v += step) {
    t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return t;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string ramp(double t) {
  // dark blue to yellow
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(40 + t * (250 - 40));
  const int g = static_cast<int>(30 + t * (220 - 30));
  const int b = static_cast<int>(120 + t * (30 - 120));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

void write_svg_plot(std::ostream& out, const PlotSpec& spec,
                    const std::vector<PlotSeries>& series, const Provenance& prov) {
  constexpr double W = 640, H = 440, L = 80, R = 150, T = 40, B = 60;
  std::vector<double> xs, ys;
  for (const auto& s : series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      const double e = i < s.yerr.size() ? s.yerr[i] : 0.0;
      ys.push_back(s.y[i]);
      ys.push_back(s.y[i] + e);
      if (!spec.logy || s.y[i] - e > 0) ys.push_back(s.y[i] - e);
    }
  }
  const Axis ax = make_axis(xs, spec.logx);
  const Axis ay = make_axis(ys, spec.logy);
  auto px = [&](double x) { return L + ax.map(x) * (W - L - R); };
  auto py = [&](double y) { return H - B - ay.map(y) * (H - T - B); };
  auto ok = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!spec.logx || x > 0) && (!spec.logy || y > 0);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<desc>" << escape(prov.comment().substr(2)) << "</desc>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(spec.title) << "</text>\n";
  out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
      << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(ax)) {
    const double x = px(t);
    out << "<line x1=\"" << x << "\" y1=\"" << H - B << "\" x2=\"" << x << "\" y2=\"" << H - B + 5
        << "\" stroke=\"black\"/>\n<text x=\"" << x << "\" y=\"" << H - B + 18
        << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ticks(ay)) {
    const double y = py(t);
    out << "<line x1=\"" << L - 5 << "\" y1=\"" << y << "\" x2=\"" << L << "\" y2=\"" << y
        << "\" stroke=\"black\"/>\n<text x=\"" << L - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  out << "<text x=\"" << L + (W - L - R) / 2 << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\">" << escape(spec.xlabel) << "</text>\n";
  out << "<text transform=\"translate(18," << T + (H - T - B) / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.ylabel) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& se = series[s];
    const std::string colour = kPalette[s % 6];
    double cmin = INFINITY, cmax = -INFINITY;
    for (double c : se.color) {
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
    }
    if (!spec.scatter) {
      std::string path;
      for (std::size_t i = 0; i < se.x.size(); ++i) {
        if (!ok(se.x[i], se.y[i])) continue;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", path.empty() ? "M" : " L", px(se.x[i]),
                      py(se.y[i]));
        path += buf;
      }
      if (!path.empty()) {
        out << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << colour
            << "\" stroke-width=\"1.5\"/>\n";
      }
    }
    for (std::size_t i = 0; i < se.x.size(); ++i) {
      if (!ok(se.x[i], se.y[i])) continue;
      const double x = px(se.x[i]), y = py(se.y[i]);
      if (i < se.yerr.size() && se.yerr[i] > 0) {
        const double hi = se.y[i] + se.yerr[i];
        const double lo = se.y[i] - se.yerr[i];
        const double y0 = (spec.logy && !(lo > 0)) ? H - B : py(lo);
        out << "<line x1=\"" << x << "\" y1=\"" << py(hi) << "\" x2=\"" << x << "\" y2=\"" << y0
            << "\" stroke=\"" << colour << "\"/>\n";
      }
      const std::string fill =
          i < se.color.size() ? ramp(cmax > cmin ? (se.color[i] - cmin) / (cmax - cmin) : 0.5)
                              : colour;
      out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << (spec.scatter ? 2 : 3)
          << "\" fill=\"" << fill << "\"/>\n";
    }
    const double ly = T + 10 + 18.0 * static_cast<double>(s);
    out << "<rect x=\"" << W - R + 12 << "\" y=\"" << ly - 8 << "\" width=\"10\" height=\"10\" fill=\""
        << (se.color.empty() ? colour : ramp(1.0)) << "\"/>\n<text x=\"" << W - R + 28
        << "\" y=\"" << ly + 1 << "\">" << escape(se.label) << "</text>\n";
    if (!se.color.empty() && std::isfinite(cmin)) {
      out << "<text x=\"" << W - R + 12 << "\" y=\"" << ly + 20 << "\" font-size=\"10\">colour: "
          << tick_label(cmin) << " to " << tick_label(cmax) << "</text>\n";
    }
  }
  out << "</svg>\n";
  if (!out) throw IoError("failed writing SVG");
}

// ---- emission --------------------------------------------------------------

namespace {

struct PlotFile {
  std::string stem;
  PlotSpec spec;
  std::vector<PlotSeries> series;
};

std::vector<PlotFile> plots_for(const std::string& sweep, const std::vector<CellSummary>& cells,
                                const std::map<std::string, Table>& extras) {
  std::vector<PlotFile> plots;
  auto by_method = [&](auto xof, bool use_sq) {
    std::vector<PlotSeries> out;
    for (const auto& c : cells) {
      auto it = std::find_if(out.begin(), out.end(),
                             [&](const PlotSeries& s) { return s.label == c.method; });
      if (it == out.end()) {
        out.push_back({c.method, {}, {}, {}, {}});
        it = std::prev(out.end());
      }
      it->x.push_back(xof(c));
      it->y.push_back(use_sq ? c.sq_err_mean : c.rel_err_mean);
      it->yerr.push_back(use_sq ? c.sq_err_std : c.rel_err_std);
    }
    return out;
  };
  const std::string family = cells.empty() ? "" : cells.front().family;
  auto dim = [](const CellSummary& c) { return static_cast<double>(c.reduced_dim); };
  if (sweep == "dims") {
    plots.push_back({"dims_rel_err",
                     {"Relative test error (" + family + ")", "reduced dimension",
                      "relative test error (%)", true, true, false},
                     by_method(dim, false)});
  } else if (sweep == "sample_complexity") {
    plots.push_back({"sample_complexity",
                     {"Squared test error versus n (" + family + ")", "training samples n",
                      "squared test error", true, true, false},
                     by_method([](const CellSummary& c) { return static_cast<double>(c.n_train); },
                               true)});
  } else if (sweep == "noise") {
    plots.push_back(
        {"noise",
         {"Robustness to noise (" + family + ")", "noise variance sigma^2", "squared test error",
          false, false, false},
         by_method([](const CellSummary& c) { return c.sigma * c.sigma; }, true)});
  } else if (sweep == "grid_transfer") {
    plots.push_back(
        {"grid_transfer",
         {"Squared test error versus test grid size (" + family + ")", "test grid nodes",
          "squared test error", true, true, false},
         by_method([](const CellSummary& c) { return static_cast<double>(c.test_grid); }, true)});
  } else if (sweep == "projection") {
    plots.push_back({"projection_error",
                     {"Relative projection error (" + family + ")", "reduced dimension",
                      "relative projection error (%)", true, true, false},
                     by_method(dim, false)});
    if (auto it = extras.find("singular_values"); it != extras.end()) {
      PlotSeries s{"singular values", {}, {}, {}, {}};
      for (const auto& r : it->second.rows) {
        s.x.push_back(r[0]);
        s.y.push_back(r[1]);
      }
      plots.push_back({"singular_values",
                       {"Singular values (" + family + ")", "index", "singular value", false,
                        true, false},
                       {s}});
    }
    if (auto it = extras.find("latent"); it != extras.end() && it->second.columns.size() >= 4) {
      const auto& t = it->second;
      const std::size_t ia = t.columns.size() - 2;
      for (std::size_t col : {ia, ia + 1}) {
        PlotSeries s{"colour = " + t.columns[col], {}, {}, {}, {}};
        for (const auto& r : t.rows) {
          s.x.push_back(r[0]);
          s.y.push_back(r[1]);
          s.color.push_back(r[col]);
        }
        plots.push_back({"latent_by_" + t.columns[col],
                         {"Latent features (" + family + "), coloured by " + t.columns[col], "z1",
                          "z2", false, false, true},
                         {s}});
      }
    }
  }
  return plots;
}

std::filesystem::path write_plot(const std::filesystem::path& dir, const PlotFile& p,
                                 const Provenance& prov) {
  const auto path = dir / (p.stem + ".svg");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_svg_plot(out, p.spec, p.series, prov);
  return path;
}

template <typename F>
std::filesystem::path write_file(const std::filesystem::path& path, F&& body) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
  return path;
}

}  // namespace

std::vector<std::filesystem::path> emit_outputs(const SweepResult& result,
                                                const ExperimentConfig& cfg,
                                                EmitFormats formats) {
  namespace fs = std::filesystem;
  const fs::path root(cfg.output_dir);
  const fs::path tables = root / "tables";
  const fs::path series = root / "series";
  fs::create_directories(tables);
  fs::create_directories(series);
  const Provenance prov = Provenance::of(cfg);
  std::vector<fs::path> files;
  const std::string& name = result.name;
  if (formats.csv) {
    files.push_back(write_file(tables / (name + "_runs.csv"),
                               [&](std::ostream& o) { write_results_csv(o, result.rows, prov); }));
    files.push_back(write_file(tables / (name + "_summary.csv"),
                               [&](std::ostream& o) { write_summary_csv(o, result.summary, prov); }));
    if (name == "dims" || name == "projection") {
      files.push_back(write_file(tables / (name + "_table.csv"), [&](std::ostream& o) {
        write_comparison_table(o, result.summary, prov);
      }));
    }
    for (const auto& [extra, t] : result.extras) {
      files.push_back(write_file(series / (name + "_" + extra + ".csv"),
                                 [&](std::ostream& o) { write_table_csv(o, t, prov); }));
    }
  }
  if (formats.json) {
    files.push_back(write_file(tables / (name + ".json"),
                               [&](std::ostream& o) { write_json(o, result, cfg); }));
  }
  if (formats.svg) {
    for (const auto& p : plots_for(name, result.summary, result.extras)) {
      files.push_back(write_plot(series, p, prov));
    }
  }
  return files;
}

std::vector<std::filesystem::path> render_plots_from_files(const std::filesystem::path& output_dir,
                                                           const std::string& sweep) {
  namespace fs = std::filesystem;
  const fs::path summary_path = output_dir / "tables" / (sweep + "_summary.csv");
  std::ifstream in(summary_path);
  if (!in) throw IoError("cannot open " + summary_path.string());
  std::string first;
  std::getline(in, first);
  Provenance prov;
  // recover the provenance comment written by the sweep
  std::istringstream fields(first.size() > 2 ? first.substr(2) : "");
  for (std::string kv; fields >> kv;) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
    if (k == "config") prov.config_fingerprint = v;
    if (k == "seed") prov.seed = std::stoull(v);
    if (k == "scale") prov.desk_scale = v == "desk";
  }
  in.clear();
  in.seekg(0);
  const auto cells = read_summary_csv(in);
  std::map<std::string, Table> extras;
  for (const std::string extra : {"singular_values", "latent"}) {
    std::ifstream e(output_dir / "series" / (sweep + "_" + extra + ".csv"));
    if (e) extras[extra] = read_table_csv(e);
  }
  fs::create_directories(output_dir / "series");
  std::vector<fs::path> files;
  for (const auto& p : plots_for(sweep, cells, extras)) {
    files.push_back(write_plot(output_dir / "series", p, prov));
  }
  return files;
}

}  // namespace aenet
