#include "aenet/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "aenet/binary_io.hpp"
#include "aenet/errors.hpp"

namespace aenet {

std::string_view to_string(Topology t) {
  return t == Topology::closed ? "closed" : "periodic";
}

Topology topology_from_string(std::string_view s) {
  if (s == "closed") return Topology::closed;
  if (s == "periodic") return Topology::periodic;
  throw ConfigError("unknown grid topology '" + std::string(s) + "'");
}

Grid1D::Grid1D(double x_lo, double x_hi, std::size_t n, Topology topology)
    : x_lo_(x_lo), x_hi_(x_hi), n_(n), topology_(topology) {
  if (n < 2) throw ConfigError("grid needs at least 2 nodes");
  if (!(x_hi > x_lo) || !std::isfinite(x_lo) || !std::isfinite(x_hi)) {
    throw ConfigError("grid needs finite x_hi > x_lo");
  }
}

double Grid1D::spacing() const {
  return topology_ == Topology::closed ? length() / static_cast<double>(n_ - 1)
                                       : length() / static_cast<double>(n_);
}

double Grid1D::node(std::size_t i) const {
  return x_lo_ + static_cast<double>(i) * spacing();
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = node(i);
  return x;
}

std::string Grid1D::describe() const {
  std::ostringstream os;
  os << to_string(topology_) << '[' << x_lo_ << ',' << x_hi_
     << (is_periodic() ? ")" : "]") << " n=" << n_;
  return os.str();
}

std::string_view to_string(QuadratureKind k) {
  switch (k) {
    case QuadratureKind::midpoint: return "midpoint";
    case QuadratureKind::trapezoid: return "trapezoid";
    case QuadratureKind::simpson: return "simpson";
  }
  return "?";
}

QuadratureKind quadrature_kind_from_string(std::string_view s) {
  if (s == "midpoint") return QuadratureKind::midpoint;
  if (s == "trapezoid") return QuadratureKind::trapezoid;
  if (s == "simpson") return QuadratureKind::simpson;
  throw ConfigError("unknown quadrature kind '" + std::string(s) + "'");
}

QuadratureRule::QuadratureRule(Grid1D grid, QuadratureKind kind,
                               std::vector<double> weights)
    : grid_(grid), kind_(kind), weights_(std::move(weights)) {
  if (weights_.size() != grid_.size()) {
    throw DimensionError("quadrature weights do not match grid size");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw ConfigError("quadrature weights must be positive and finite");
    }
    total += w;
  }
  if (std::abs(total - grid_.length()) > 1e-12 * grid_.length()) {
    throw ConfigError("quadrature weights must sum to the domain length");
  }
}

bool QuadratureRule::is_uniform() const {
  return std::all_of(weights_.begin(), weights_.end(),
                     [&](double w) { return w == weights_.front(); });
}

DiscreteFunction::DiscreteFunction(Grid1D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw DimensionError("function has " + std::to_string(values_.size()) +
                         " values on a grid of " +
                         std::to_string(grid_.size()) + " nodes");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw EvaluationError("non-finite value at node " + std::to_string(i));
    }
  }
}

DiscreteFunction discretize(const ScalarFunction& f, const Grid1D& grid) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    values[i] = f(x);
    if (!std::isfinite(values[i])) {
      std::ostringstream os;
      os << "function is not finite at node " << i << " (x = " << x << ")";
      throw EvaluationError(os.str());
    }
  }
  return {grid, std::move(values)};
}

QuadratureRule make_quadrature(const Grid1D& grid, QuadratureKind kind) {
  const std::size_t n = grid.size();
  const double len = grid.length();
  std::vector<double> w(n);
  switch (kind) {
    case QuadratureKind::midpoint:
      // Each node owns a cell of width len / n.
      std::fill(w.begin(), w.end(), len / static_cast<double>(n));
      break;
    case QuadratureKind::trapezoid: {
      const double h = grid.spacing();
      std::fill(w.begin(), w.end(), h);
      if (!grid.is_periodic()) {
        w.front() = h / 2;
        w.back() = h / 2;
      }
      break;
    }
    case QuadratureKind::simpson: {
      if (grid.is_periodic()) {
        throw ConfigError("simpson rule requires a closed grid");
      }
      if (n % 2 == 0) {
        throw ConfigError("simpson rule requires an odd number of nodes, got " +
                          std::to_string(n));
      }
      const double h = grid.spacing();
      for (std::size_t i = 0; i < n; ++i) {
        const double c = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        w[i] = c * h / 3.0;
      }
      break;
    }
  }
  return {grid, kind, std::move(w)};
}

double weighted_inner(std::span<const double> u, std::span<const double> v,
                      const QuadratureRule& rule) {
  const auto w = rule.weights();
  if (u.size() != w.size() || v.size() != w.size()) {
    throw DimensionError("weighted inner product: size mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * u[i] * v[i];
  return acc;
}

double weighted_norm(std::span<const double> u, const QuadratureRule& rule) {
  return std::sqrt(weighted_inner(u, u, rule));
}

double weighted_inner(const DiscreteFunction& u, const DiscreteFunction& v,
                      const QuadratureRule& rule) {
  if (!(u.grid() == rule.grid()) || !(v.grid() == rule.grid())) {
    throw DimensionError("weighted inner product: operands live on " +
                         u.grid().describe() + " and " + v.grid().describe() +
                         ", rule on " + rule.grid().describe());
  }
  return weighted_inner(u.values(), v.values(), rule);
}

double weighted_norm(const DiscreteFunction& u, const QuadratureRule& rule) {
  return std::sqrt(weighted_inner(u, u, rule));
}

std::string_view to_string(InterpMethod m) {
  switch (m) {
    case InterpMethod::piecewise_constant: return "piecewise_constant";
    case InterpMethod::linear: return "linear";
    case InterpMethod::cubic: return "cubic";
  }
  return "?";
}

InterpMethod interp_method_from_string(std::string_view s) {
  if (s == "piecewise_constant" || s == "constant") {
    return InterpMethod::piecewise_constant;
  }
  if (s == "linear") return InterpMethod::linear;
  if (s == "cubic") return InterpMethod::cubic;
  throw ConfigError("unknown interpolation method '" + std::string(s) + "'");
}

namespace {

// Second derivatives of the interpolating cubic spline at the nodes.
std::vector<double> spline_moments_closed(std::span<const double> y, double h) {
  const std::size_t n = y.size();
  std::vector<double> m(n, 0.0);
  if (n == 2) return m;
  auto rhs = [&](std::size_t i) {
    return 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h);
  };
  if (n == 3) {
    // Not-a-knot with three nodes is the interpolating parabola.
    std::fill(m.begin(), m.end(), rhs(1) / 6.0);
    return m;
  }
  // Not-a-knot (M0 = 2 M1 - M2) decouples the first and last interior rows.
  m[1] = rhs(1) / 6.0;
  m[n - 2] = rhs(n - 2) / 6.0;
  const std::size_t k = n - 4;  // unknowns m[2..n-3]
  if (k > 0) {
    std::vector<double> c(k), d(k);
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t i = j + 2;
      double r = rhs(i);
      if (j == 0) r -= m[1];
      if (j == k - 1) r -= m[n - 2];
      const double denom = 4.0 - (j > 0 ? c[j - 1] : 0.0);
      c[j] = 1.0 / denom;
      d[j] = (r - (j > 0 ? d[j - 1] : 0.0)) / denom;
    }
    for (std::size_t j = k; j-- > 0;) {
      m[j + 2] = d[j] - (j + 1 < k ? c[j] * m[j + 3] : 0.0);
    }
  }
  m[0] = 2.0 * m[1] - m[2];
  m[n - 1] = 2.0 * m[n - 2] - m[n - 3];
  return m;
}

// Solves the tridiagonal system with unit off-diagonals and diagonal `diag`.
std::vector<double> solve_tridiagonal(std::vector<double> diag,
                                      std::vector<double> r) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double f = 1.0 / diag[i - 1];
    diag[i] -= f;
    r[i] -= f * r[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = r[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (r[i] - x[i + 1]) / diag[i];
  return x;
}

std::vector<double> spline_moments_periodic(std::span<const double> y,
                                            double h) {
  const std::size_t n = y.size();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ym = y[(i + n - 1) % n];
    const double yp = y[(i + 1) % n];
    r[i] = 6.0 * (yp - 2.0 * y[i] + ym) / (h * h);
  }
  // Cyclic system M_{i-1} + 4 M_i + M_{i+1} = r_i via Sherman-Morrison with
  // corner correction vectors u = (gamma, 0, ..., 1), v = (1, 0, ..., 1/gamma).
  const double gamma = -4.0;
  std::vector<double> diag(n, 4.0);
  diag[0] = 4.0 - gamma;
  diag[n - 1] = 4.0 - 1.0 / gamma;
  std::vector<double> x = solve_tridiagonal(diag, r);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = 1.0;
  std::vector<double> z = solve_tridiagonal(diag, u);
  const double fact =
      (x[0] + x[n - 1] / gamma) / (1.0 + z[0] + z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
  return x;
}

double spline_eval(double yl, double yr, double ml, double mr, double h,
                   double t) {
  const double a = h - t;
  return ml * a * a * a / (6.0 * h) + mr * t * t * t / (6.0 * h) +
         (yl / h - ml * h / 6.0) * a + (yr / h - mr * h / 6.0) * t;
}

}  // namespace

DiscreteFunction interpolate(const DiscreteFunction& u, const Grid1D& target,
                             InterpMethod method) {
  const Grid1D& src = u.grid();
  if (src == target) return u;
  if (src.topology() != target.topology()) {
    throw ConfigError("interpolation between grids of different topology");
  }
  const auto y = u.values();
  const std::size_t n = src.size();
  const double h = src.spacing();
  const bool periodic = src.is_periodic();

  std::vector<double> moments;
  if (method == InterpMethod::cubic) {
    moments = (periodic && n >= 3) ? spline_moments_periodic(y, h)
              : periodic           ? std::vector<double>(n, 0.0)
                                   : spline_moments_closed(y, h);
  }

  std::vector<double> out(target.size());
  for (std::size_t j = 0; j < target.size(); ++j) {
    const double x = target.node(j);
    double s = (x - src.x_lo()) / h;
    if (periodic) {
      s = std::fmod(s, static_cast<double>(n));
      if (s < 0) s += static_cast<double>(n);
    } else {
      const double limit = static_cast<double>(n - 1);
      if (s < -1.0 - 1e-9 || s > limit + 1.0 + 1e-9) {
        std::ostringstream os;
        os << "target node x = " << x << " lies more than one spacing outside "
           << src.describe();
        throw RangeError(os.str());
      }
      s = std::clamp(s, 0.0, limit);
    }
    // Nodes shared with the source grid are copied exactly.
    const double nearest = std::round(s);
    if (std::abs(s - nearest) < 1e-9 ||
        method == InterpMethod::piecewise_constant) {
      out[j] = y[static_cast<std::size_t>(nearest) % n];
      continue;
    }
    std::size_t i = static_cast<std::size_t>(std::floor(s));
    if (!periodic) i = std::min(i, n - 2);
    const std::size_t ip = (i + 1) % n;
    const double frac = s - static_cast<double>(i);
    if (method == InterpMethod::linear) {
      out[j] = (1.0 - frac) * y[i] + frac * y[ip];
    } else {
      out[j] = spline_eval(y[i], y[ip], moments[i], moments[ip], h, frac * h);
    }
  }
  return {target, std::move(out)};
}

NormEquivalenceReport verify_norm_equivalence(const FunctionSampler& sampler,
                                              const Grid1D& grid,
                                              const QuadratureRule& rule,
                                              std::size_t trials,
                                              std::uint64_t seed) {
  if (!(rule.grid() == grid)) {
    throw DimensionError("quadrature rule does not belong to the grid");
  }
  Rng rng(seed);
  NormEquivalenceReport report;
  report.trials = trials;
  report.min_ratio = std::numeric_limits<double>::infinity();
  report.max_ratio = 0.0;
  double worst_log = -1.0;
  const auto w = rule.weights();
  for (std::size_t t = 0; t < trials; ++t) {
    SampledFunction sample = sampler(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      acc += w[i] * std::norm(sample.f(grid.node(i)));
    }
    const double ratio = std::sqrt(acc) / sample.l2_norm;
    if (ratio < 0.5 || ratio > 2.0) ++report.violations;
    report.min_ratio = std::min(report.min_ratio, ratio);
    report.max_ratio = std::max(report.max_ratio, ratio);
    const double dev = std::abs(std::log(ratio));
    if (dev > worst_log) {
      worst_log = dev;
      report.worst_ratio = ratio;
    }
  }
  return report;
}

FunctionSampler fourier_family_sampler(int max_mode, double coef_lo,
                                       double coef_hi) {
  if (max_mode < 0 || !(coef_lo > 0) || coef_hi < coef_lo) {
    throw ConfigError("fourier family needs N >= 0 and 0 < a <= A");
  }
  return [=](Rng& rng) {
    std::uniform_real_distribution<double> mag(coef_lo, coef_hi);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::vector<std::complex<double>> coef;
    double norm2 = 0.0;
    for (int k = -max_mode; k <= max_mode; ++k) {
      const double r = mag(rng);
      coef.push_back(std::polar(r, phase(rng)));
      norm2 += r * r;
    }
    SampledFunction s;
    s.l2_norm = std::sqrt(norm2);
    s.f = [coef = std::move(coef), max_mode](double x) {
      std::complex<double> acc = 0.0;
      for (int k = -max_mode; k <= max_mode; ++k) {
        acc += coef[static_cast<std::size_t>(k + max_mode)] *
               std::polar(1.0, 2.0 * std::numbers::pi * k * x);
      }
      return acc;
    };
    return s;
  };
}

double fourier_family_max_spacing(int max_mode, double coef_lo,
                                  double coef_hi) {
  const double n = max_mode;
  return coef_lo * std::sqrt(2.0 * n + 1.0) /
         (2.0 * std::numbers::pi * coef_hi * n * (n + 1.0));
}

std::vector<double> geometric_scales(double largest, double smallest,
                                     std::size_t count) {
  if (count < 2 || !(largest > 0) || !(smallest > 0)) {
    throw ConfigError("geometric scales need count >= 2 and positive ends");
  }
  std::vector<double> s(count);
  const double ratio = std::log(smallest / largest) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    s[i] = largest * std::exp(ratio * static_cast<double>(i));
  }
  return s;
}

namespace {

struct BoxHash {
  std::size_t operator()(const std::vector<std::int64_t>& key) const {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (auto v : key) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

std::size_t count_occupied_boxes(const Eigen::MatrixXd& points, double scale) {
  std::unordered_set<std::vector<std::int64_t>, BoxHash> boxes;
  boxes.reserve(static_cast<std::size_t>(points.rows()));
  std::vector<std::int64_t> key(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
      key[static_cast<std::size_t>(c)] =
          static_cast<std::int64_t>(std::floor(points(r, c) / scale));
    }
    boxes.insert(key);
  }
  return boxes.size();
}

std::size_t count_covering_boxes(const Eigen::MatrixXd& points, double scale) {
  if (!(scale > 0)) throw ConfigError("box scale must be positive");
  const double radius = scale / 2.0;
  // Row-major copy: the inner loop walks one point at a time.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> p = points;
  std::vector<Eigen::Index> centres;
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    bool covered = false;
    for (Eigen::Index c : centres) {
      if ((p.row(r) - p.row(c)).cwiseAbs().maxCoeff() <= radius) {
        covered = true;
        break;
      }
    }
    if (!covered) centres.push_back(r);
  }
  return centres.size();
}

double box_counting_dimension(const Eigen::MatrixXd& points,
                              std::span<const double> scales, BoxCount method) {
  if (points.rows() == 0) throw ConfigError("box counting needs points");
  if (scales.size() < 2) throw ConfigError("box counting needs >= 2 scales");
  const auto [lo, hi] = std::minmax_element(scales.begin(), scales.end());
  if (!(*lo > 0)) throw ConfigError("box-counting scales must be positive");
  if (*lo == *hi) throw ConfigError("box-counting scales are all equal");

  const double m = static_cast<double>(scales.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double eps : scales) {
    const double x = std::log(1.0 / eps);
    const std::size_t count = method == BoxCount::lattice
                                  ? count_occupied_boxes(points, eps)
                                  : count_covering_boxes(points, eps);
    const double y = std::log(static_cast<double>(count));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

void write_csv(std::ostream& out, const DiscreteFunction& u) {
  const Grid1D& g = u.grid();
  out << "x_lo,x_hi,n,topology\n" << std::setprecision(17) << g.x_lo() << ','
      << g.x_hi() << ',' << g.size() << ',' << to_string(g.topology())
      << "\nvalue\n";
  for (double v : u.values()) out << v << '\n';
}

DiscreteFunction read_csv_function(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "x_lo,x_hi,n,topology") {
    throw IoError("function CSV: missing grid header");
  }
  if (!std::getline(in, line)) throw IoError("function CSV: missing grid row");
  std::istringstream row(line);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(row, field, ',')) fields.push_back(field);
  if (fields.size() != 4) throw IoError("function CSV: malformed grid row");
  Grid1D grid(std::stod(fields[0]), std::stod(fields[1]),
              std::stoul(fields[2]), topology_from_string(fields[3]));
  if (!std::getline(in, line) || line != "value") {
    throw IoError("function CSV: missing value header");
  }
  std::vector<double> values;
  values.reserve(grid.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    values.push_back(std::strtod(line.c_str(), nullptr));
  }
  return {grid, std::move(values)};
}

void write_grid_binary(std::ostream& out, const Grid1D& grid) {
  io::write_le(out, grid.x_lo());
  io::write_le(out, grid.x_hi());
  io::write_le<std::uint64_t>(out, grid.size());
  io::write_le<std::uint8_t>(out, grid.is_periodic() ? 1 : 0);
}

Grid1D read_grid_binary(std::istream& in) {
  const double lo = io::read_le<double>(in);
  const double hi = io::read_le<double>(in);
  const auto n = io::read_le<std::uint64_t>(in);
  const auto tag = io::read_le<std::uint8_t>(in);
  if (tag > 1) throw IoError("bad topology tag in grid descriptor");
  return {lo, hi, static_cast<std::size_t>(n),
          tag == 1 ? Topology::periodic : Topology::closed};
}

void write_binary(std::ostream& out, const DiscreteFunction& u) {
  out.write("AEDF", 4);
  io::write_le<std::uint32_t>(out, 1);
  write_grid_binary(out, u.grid());
  io::write_array(out, u.values());
}

DiscreteFunction read_binary_function(std::istream& in) {
  io::expect_magic(in, "AEDF");
  if (io::read_le<std::uint32_t>(in) != 1) {
    throw IoError("unsupported function file version");
  }
  Grid1D grid = read_grid_binary(in);
  std::vector<double> values(grid.size());
  io::read_array(in, std::span<double>(values));
  return {grid, std::move(values)};
}

}  // namespace aenet
