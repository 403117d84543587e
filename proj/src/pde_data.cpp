#include "aenet/pde_data.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "aenet/binary_io.hpp"
#include "aenet/errors.hpp"
#include "aenet/parallel.hpp"
#include "aenet/spectral.hpp"

namespace aenet {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::transport: return "transport";
    case Family::burgers: return "burgers";
    case Family::kdv: return "kdv";
  }
  return "?";
}

Family family_from_string(std::string_view s) {
  if (s == "transport") return Family::transport;
  if (s == "burgers") return Family::burgers;
  if (s == "kdv") return Family::kdv;
  throw ConfigError("unknown PDE family '" + std::string(s) + "'");
}

ParamBox parameter_box(Family f) {
  switch (f) {
    case Family::transport: return {1.0, 4.0, 0.0, 1.0};
    case Family::burgers: return {-0.9, 0.9, 0.0, 1.0};
    case Family::kdv: return {6.0, 18.0, 0.0, 3.0};
  }
  throw ConfigError("unknown family");
}

void IntrinsicParams::validate() const {
  const ParamBox box = parameter_box(family);
  if (!(a >= box.a_lo && a <= box.a_hi && h >= box.h_lo && h <= box.h_hi)) {
    std::ostringstream os;
    os << to_string(family) << " parameters (a=" << a << ", h=" << h
       << ") outside [" << box.a_lo << ',' << box.a_hi << "] x [" << box.h_lo
       << ',' << box.h_hi << ']';
    throw ConfigError(os.str());
  }
}

Grid1D default_grid(Family f, std::size_t n) {
  switch (f) {
    case Family::transport: return Grid1D::closed(0.0, 1.0, n);
    case Family::burgers: return Grid1D::periodic(0.0, 1.0, n);
    case Family::kdv: return Grid1D::periodic(0.0, 6.0, n);
  }
  throw ConfigError("unknown family");
}

// ---- transport -------------------------------------------------------------

ScalarFunction hat(double alpha, double t) {
  return [alpha, t](double x) {
    auto relu = [](double v) { return v > 0.0 ? v : 0.0; };
    constexpr double eps = kHatWidth;
    // Exact zeros off the support; the three ramps cancel only to rounding.
    if (x <= t || x >= t + eps) return 0.0;
    return (2.0 * alpha / eps) *
           (relu(x - t) - 2.0 * relu(x - t - eps / 2.0) + relu(x - t - eps));
  };
}

ScalarFunction transport_ic(const IntrinsicParams& p) {
  if (p.family != Family::transport) throw ConfigError("transport_ic: wrong family");
  p.validate();
  auto first = hat(p.a, 0.1);
  auto second = hat(2.5, 0.2 + 0.1 * p.h);
  return [first, second](double x) { return first(x) + second(x); };
}

DiscreteFunction solve_transport(const ScalarFunction& g, const Grid1D& grid,
                                 double t) {
  const double inflow = grid.x_lo();
  return discretize(
      [&](double x) { return x - t >= inflow ? g(x - t) : 0.0; }, grid);
}

// ---- GRF -------------------------------------------------------------------

double GrfSpec::eigenvalue(int k, double length) const {
  const double wave = 2.0 * std::numbers::pi * k / length;
  return amplitude * std::pow(wave * wave + inverse_length * inverse_length, -decay);
}

DiscreteFunction sample_grf(const GrfSpec& spec, const Grid1D& grid,
                            std::uint64_t seed) {
  if (!grid.is_periodic()) throw ConfigError("GRF sampling needs a periodic grid");
  const int nyquist = static_cast<int>(grid.size() / 2);
  const int cutoff = spec.cutoff > 0 ? spec.cutoff : nyquist;
  if (cutoff > nyquist) throw ConfigError("GRF cutoff exceeds the grid's Nyquist mode");
  if (!(spec.amplitude > 0 && spec.inverse_length > 0 && spec.decay > 0)) {
    throw ConfigError("GRF parameters must be positive");
  }
  Rng rng(seed);
  std::normal_distribution<double> normal;
  const double len = grid.length();
  const double basis_scale = std::sqrt(2.0 / len);
  std::vector<double> values(grid.size(), 0.0);
  for (int k = 1; k <= cutoff; ++k) {
    const double xi = normal(rng);
    const double eta = normal(rng);
    const double amp = std::sqrt(spec.eigenvalue(k, len)) * basis_scale;
    const double omega = 2.0 * std::numbers::pi * k / len;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.node(i) - grid.x_lo();
      values[i] += amp * (xi * std::cos(omega * x) + eta * std::sin(omega * x));
    }
  }
  return {grid, std::move(values)};
}

// ---- Burgers' --------------------------------------------------------------

namespace {

// Trigonometric interpolant of periodic samples, evaluable anywhere.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const DiscreteFunction& u)
      : lo_(u.grid().x_lo()), n_(u.size()), k_(wavenumbers(u.size(), u.grid().length())) {
    RealFft fft(n_);
    spec_.resize(fft.spectrum_size());
    fft.forward(u.values(), spec_);
    for (auto& c : spec_) c /= static_cast<double>(n_);
  }

  double operator()(double x) const {
    const double s = x - lo_;
    double acc = spec_[0].real();
    const std::size_t last = spec_.size() - 1;
    for (std::size_t m = 1; m < spec_.size(); ++m) {
      const double factor = (n_ % 2 == 0 && m == last) ? 1.0 : 2.0;
      const Complex e = std::polar(1.0, k_[m] * s);
      if (factor == 1.0) {
        acc += spec_[m].real() * e.real();
      } else {
        acc += factor * (spec_[m] * e).real();
      }
    }
    return acc;
  }

 private:
  double lo_;
  std::size_t n_;
  std::vector<double> k_;
  std::vector<Complex> spec_;
};

void check_burgers_basis(const IntrinsicParams& p, const DiscreteFunction& w0,
                         const DiscreteFunction& w1) {
  if (p.family != Family::burgers) throw ConfigError("burgers_ic: wrong family");
  p.validate();
  if (!w0.grid().is_periodic() || !(w0.grid() == w1.grid())) {
    throw ConfigError("burgers_ic: w0 and w1 must share one periodic grid");
  }
}

}  // namespace

ScalarFunction burgers_ic(const IntrinsicParams& p, const DiscreteFunction& w0,
                          const DiscreteFunction& w1) {
  check_burgers_basis(p, w0, w1);
  const double c0 = p.a;
  const double c1 = std::sqrt(1.0 - p.a * p.a);
  const double shift = p.h;
  auto f0 = std::make_shared<TrigInterpolant>(w0);
  auto f1 = std::make_shared<TrigInterpolant>(w1);
  return [=](double x) { return c0 * (*f0)(x - shift) + c1 * (*f1)(x - shift); };
}

DiscreteFunction burgers_ic_on_grid(const IntrinsicParams& p,
                                    const DiscreteFunction& w0,
                                    const DiscreteFunction& w1) {
  check_burgers_basis(p, w0, w1);
  const double c0 = p.a;
  const double c1 = std::sqrt(1.0 - p.a * p.a);
  std::vector<double> mix(w0.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = c0 * w0[i] + c1 * w1[i];
  if (p.h == 0.0) return {w0.grid(), std::move(mix)};
  return {w0.grid(), spectral_shift(mix, w0.grid().length(), p.h)};
}

// ---- solvers ---------------------------------------------------------------

namespace {

long step_count(double final_time, double dt) {
  if (!(final_time >= 0) || !(dt > 0)) throw ConfigError("need T >= 0 and dt > 0");
  return static_cast<long>(std::ceil(final_time / dt - 1e-9));
}

Etdrk4 make_integrator(Family family, const Grid1D& grid, double final_time,
                       double dt, double nu) {
  if (!grid.is_periodic()) throw ConfigError("spectral solvers need a periodic grid");
  const long steps = std::max(1L, step_count(final_time, dt));
  const double dt_eff = final_time > 0 ? final_time / static_cast<double>(steps) : dt;
  const auto k = wavenumbers(grid.size(), grid.length());
  std::vector<Complex> linear(k.size());
  for (std::size_t m = 0; m < k.size(); ++m) {
    if (family == Family::burgers) {
      linear[m] = -nu * k[m] * k[m];
    } else {
      // -u_xxx -> +i k^3; the Nyquist mode has no well-defined odd derivative.
      const bool nyquist = grid.size() % 2 == 0 && m == k.size() - 1;
      linear[m] = nyquist ? Complex(0.0) : Complex(0.0, k[m] * k[m] * k[m]);
    }
  }
  return Etdrk4(grid.size(), grid.length(), std::move(linear), dt_eff);
}

}  // namespace

DiscreteFunction solve_burgers(const DiscreteFunction& g, double nu,
                               double final_time, double dt) {
  if (!(nu > 0)) throw ConfigError("Burgers' viscosity must be positive");
  if (final_time == 0.0) return g;
  auto integrator = make_integrator(Family::burgers, g.grid(), final_time, dt, nu);
  return {g.grid(), integrator.integrate(g.values(), step_count(final_time, dt))};
}

DiscreteFunction solve_kdv(const DiscreteFunction& g, double final_time, double dt) {
  if (final_time == 0.0) return g;
  auto integrator = make_integrator(Family::kdv, g.grid(), final_time, dt, 0.0);
  return {g.grid(), integrator.integrate(g.values(), step_count(final_time, dt))};
}

ScalarFunction kdv_ic(const IntrinsicParams& p) {
  if (p.family != Family::kdv) throw ConfigError("kdv_ic: wrong family");
  p.validate();
  const double a = p.a;
  const double h = p.h;
  return [a, h](double x) {
    auto sech2 = [](double v) {
      const double s = 1.0 / std::cosh(v);
      return s * s;
    };
    return (a * a / 2.0) * sech2((a / 2.0) * (x - 1.0)) +
           (36.0 / 2.0) * sech2((36.0 / 2.0) * (x - 2.0 - h));
  };
}

struct FamilySolver::Impl {
  Family family;
  Grid1D grid;
  std::optional<Etdrk4> integrator;
  long steps = 0;
};

FamilySolver::FamilySolver(Family family, const Grid1D& grid, double dt)
    : impl_(std::make_unique<Impl>(Impl{family, grid, std::nullopt, 0})) {
  if (family == Family::burgers) {
    const double step = dt > 0 ? dt : kBurgersDt;
    impl_->integrator.emplace(
        make_integrator(family, grid, kBurgersTime, step, kBurgersViscosity));
    impl_->steps = step_count(kBurgersTime, step);
  } else if (family == Family::kdv) {
    const double step = dt > 0 ? dt : kKdvDt;
    impl_->integrator.emplace(make_integrator(family, grid, kKdvTime, step, 0.0));
    impl_->steps = step_count(kKdvTime, step);
  }
}

FamilySolver::~FamilySolver() = default;
FamilySolver::FamilySolver(FamilySolver&&) noexcept = default;
FamilySolver& FamilySolver::operator=(FamilySolver&&) noexcept = default;

DiscreteFunction FamilySolver::solve(const DiscreteFunction& g) {
  if (!(g.grid() == impl_->grid)) throw DimensionError("FamilySolver: grid mismatch");
  if (!impl_->integrator) {
    throw ConfigError("FamilySolver::solve needs a spectral family; use solve_transport");
  }
  return {g.grid(), impl_->integrator->integrate(g.values(), impl_->steps)};
}

// ---- datasets --------------------------------------------------------------

namespace {

DiscreteFunction row_function(const Grid1D& grid, const Eigen::MatrixXd& m,
                              std::size_t i) {
  const Eigen::Index r = static_cast<Eigen::Index>(i);
  std::vector<double> v(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) v[static_cast<std::size_t>(c)] = m(r, c);
  return {grid, std::move(v)};
}

void set_row(Eigen::MatrixXd& m, std::size_t i, std::span<const double> v) {
  for (std::size_t c = 0; c < v.size(); ++c) {
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v[c];
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

DiscreteFunction FunctionPairDataset::input(std::size_t i) const {
  return row_function(grid_in, inputs, i);
}
DiscreteFunction FunctionPairDataset::clean_output(std::size_t i) const {
  return row_function(grid_out, clean_outputs, i);
}
DiscreteFunction FunctionPairDataset::noisy_output(std::size_t i) const {
  return row_function(grid_out, noisy_outputs, i);
}

void FunctionPairDataset::validate() const {
  const auto n = static_cast<Eigen::Index>(params.size());
  if (inputs.rows() != n || clean_outputs.rows() != n || noisy_outputs.rows() != n ||
      sample_seeds.size() != params.size()) {
    throw DimensionError("dataset: per-sample lists have different lengths");
  }
  if (inputs.cols() != static_cast<Eigen::Index>(grid_in.size()) ||
      clean_outputs.cols() != static_cast<Eigen::Index>(grid_out.size()) ||
      noisy_outputs.cols() != clean_outputs.cols()) {
    throw DimensionError("dataset: matrix widths do not match the grids");
  }
}

FunctionPairDataset FunctionPairDataset::head(std::size_t n) const {
  if (n > size()) throw ConfigError("dataset head larger than dataset");
  FunctionPairDataset out = *this;
  const auto rows = static_cast<Eigen::Index>(n);
  out.inputs = inputs.topRows(rows);
  out.clean_outputs = clean_outputs.topRows(rows);
  out.noisy_outputs = noisy_outputs.topRows(rows);
  out.params.resize(n);
  out.sample_seeds.resize(n);
  return out;
}

FunctionPairDataset add_noise(FunctionPairDataset ds, double sigma,
                              std::uint64_t seed) {
  if (!(sigma >= 0)) throw ConfigError("noise sigma must be >= 0");
  ds.noise_sigma = sigma;
  ds.noise_seed = seed;
  if (sigma == 0.0) {
    ds.noisy_outputs = ds.clean_outputs;
    return ds;
  }
  ds.noisy_outputs.resize(ds.clean_outputs.rows(), ds.clean_outputs.cols());
  std::normal_distribution<double> normal;
  for (Eigen::Index r = 0; r < ds.clean_outputs.rows(); ++r) {
    Rng rng(derive_seed(seed, "noise", static_cast<std::uint64_t>(r)));
    for (Eigen::Index c = 0; c < ds.clean_outputs.cols(); ++c) {
      ds.noisy_outputs(r, c) = ds.clean_outputs(r, c) + sigma * normal(rng);
    }
  }
  return ds;
}

std::pair<DiscreteFunction, DiscreteFunction> burgers_basis(const Grid1D& grid,
                                                            std::uint64_t seed) {
  GrfSpec spec;
  return {sample_grf(spec, grid, derive_seed(seed, "grf-w0")),
          sample_grf(spec, grid, derive_seed(seed, "grf-w1"))};
}

ScalarFunction family_ic(const IntrinsicParams& p, const Grid1D& native_grid,
                         std::uint64_t dataset_seed) {
  switch (p.family) {
    case Family::transport: return transport_ic(p);
    case Family::kdv: return kdv_ic(p);
    case Family::burgers: {
      auto [w0, w1] = burgers_basis(native_grid, dataset_seed);
      return burgers_ic(p, w0, w1);
    }
  }
  throw ConfigError("unknown family");
}

namespace {

FunctionPairDataset build_split(Family family, std::size_t n, std::string_view split,
                                const Grid1D& grid_in, const Grid1D& grid_out,
                                std::uint64_t seed, int workers) {
  FunctionPairDataset ds;
  ds.family = family;
  ds.grid_in = grid_in;
  ds.grid_out = grid_out;
  ds.dataset_seed = seed;
  ds.inputs.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(grid_in.size()));
  ds.clean_outputs.resize(static_cast<Eigen::Index>(n),
                          static_cast<Eigen::Index>(grid_out.size()));
  ds.params.resize(n);
  ds.sample_seeds.resize(n);

  const ParamBox box = parameter_box(family);
  std::optional<std::pair<DiscreteFunction, DiscreteFunction>> basis_in;
  if (family == Family::burgers) {
    // The basis lives on the input grid; both sides are sampled from it.
    basis_in = burgers_basis(grid_in, seed);
  }

  workers = resolve_workers(workers);
  std::vector<std::unique_ptr<FamilySolver>> solvers(static_cast<std::size_t>(workers));
  for (auto& s : solvers) {
    if (family != Family::transport) s = std::make_unique<FamilySolver>(family, grid_out);
  }

  parallel_for(n, workers, [&](std::size_t i, int worker) {
    const std::uint64_t sample_seed = derive_seed(seed, split, i);
    Rng rng(sample_seed);
    std::uniform_real_distribution<double> ua(box.a_lo, box.a_hi);
    std::uniform_real_distribution<double> uh(box.h_lo, box.h_hi);
    IntrinsicParams p{family, 0.0, 0.0};
    p.a = ua(rng);
    p.h = uh(rng);
    ds.params[i] = p;
    ds.sample_seeds[i] = sample_seed;

    if (family == Family::transport) {
      auto g = transport_ic(p);
      set_row(ds.inputs, i, discretize(g, grid_in).values());
      set_row(ds.clean_outputs, i, solve_transport(g, grid_out).values());
      return;
    }
    DiscreteFunction u_in = family == Family::burgers
                                ? burgers_ic_on_grid(p, basis_in->first, basis_in->second)
                                : discretize(kdv_ic(p), grid_in);
    DiscreteFunction u_solver_grid =
        grid_out == grid_in ? u_in
        : family == Family::burgers
            ? discretize(burgers_ic(p, basis_in->first, basis_in->second), grid_out)
            : discretize(kdv_ic(p), grid_out);
    set_row(ds.inputs, i, u_in.values());
    set_row(ds.clean_outputs, i, solvers[static_cast<std::size_t>(worker)]->solve(u_solver_grid).values());
  });

  ds.noisy_outputs = ds.clean_outputs;
  ds.metadata["family"] = std::string(to_string(family));
  ds.metadata["split"] = std::string(split);
  ds.metadata["dataset_seed"] = std::to_string(seed);
  if (family == Family::burgers) {
    ds.metadata["grf_seed_w0"] = std::to_string(derive_seed(seed, "grf-w0"));
    ds.metadata["grf_seed_w1"] = std::to_string(derive_seed(seed, "grf-w1"));
  }
  return ds;
}

}  // namespace

DatasetSplit make_dataset(Family family, std::size_t n_train, std::size_t n_test,
                          const Grid1D& grid_in, const Grid1D& grid_out,
                          double sigma, std::uint64_t seed, int workers) {
  if (n_train == 0) throw ConfigError("make_dataset: n_train must be positive");
  DatasetSplit out;
  out.train = build_split(family, n_train, "train", grid_in, grid_out, seed, workers);
  out.train = add_noise(std::move(out.train), sigma, derive_seed(seed, "noise"));
  out.test = build_split(family, n_test, "test", grid_in, grid_out, seed, workers);
  out.test.noise_seed = derive_seed(seed, "noise");
  return out;
}

Eigen::MatrixXd resample_inputs(const FunctionPairDataset& reference,
                                const Grid1D& grid) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(reference.size()),
                      static_cast<Eigen::Index>(grid.size()));
  std::optional<std::pair<DiscreteFunction, DiscreteFunction>> basis;
  if (reference.family == Family::burgers) {
    basis = burgers_basis(reference.grid_in, reference.dataset_seed);
  }
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const IntrinsicParams& p = reference.params[i];
    ScalarFunction g = p.family == Family::burgers
                           ? burgers_ic(p, basis->first, basis->second)
                           : family_ic(p, reference.grid_in, reference.dataset_seed);
    set_row(out, i, discretize(g, grid).values());
  }
  return out;
}

// ---- persistence -----------------------------------------------------------

namespace {

void write_matrix_binary(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) io::write_le(out, m(r, c));
  }
}

Eigen::MatrixXd read_matrix_binary(std::istream& in, std::uint64_t rows, std::uint64_t cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = io::read_le<double>(in);
  }
  return m;
}

}  // namespace

void write_dataset_binary(std::ostream& out, const FunctionPairDataset& ds) {
  ds.validate();
  out.write("AEDS", 4);
  io::write_le<std::uint32_t>(out, 1);
  io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(ds.family));
  write_grid_binary(out, ds.grid_in);
  write_grid_binary(out, ds.grid_out);
  io::write_le<std::uint64_t>(out, ds.size());
  io::write_le(out, ds.noise_sigma);
  io::write_le(out, ds.noise_seed);
  io::write_le(out, ds.dataset_seed);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(ds.params[i].family));
    io::write_le(out, ds.params[i].a);
    io::write_le(out, ds.params[i].h);
    io::write_le(out, ds.sample_seeds[i]);
  }
  write_matrix_binary(out, ds.inputs);
  write_matrix_binary(out, ds.clean_outputs);
  write_matrix_binary(out, ds.noisy_outputs);
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(ds.metadata.size()));
  for (const auto& [k, v] : ds.metadata) {
    io::write_string(out, k);
    io::write_string(out, v);
  }
  if (!out) throw IoError("failed writing dataset");
}

FunctionPairDataset read_dataset_binary(std::istream& in) {
  io::expect_magic(in, "AEDS");
  if (io::read_le<std::uint32_t>(in) != 1) throw IoError("unsupported dataset version");
  FunctionPairDataset ds;
  const auto fam = io::read_le<std::uint8_t>(in);
  if (fam > 2) throw IoError("bad family tag");
  ds.family = static_cast<Family>(fam);
  ds.grid_in = read_grid_binary(in);
  ds.grid_out = read_grid_binary(in);
  const auto n = io::read_le<std::uint64_t>(in);
  if (n > (1ull << 32)) throw IoError("implausible dataset size");
  ds.noise_sigma = io::read_le<double>(in);
  ds.noise_seed = io::read_le<std::uint64_t>(in);
  ds.dataset_seed = io::read_le<std::uint64_t>(in);
  ds.params.resize(n);
  ds.sample_seeds.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = io::read_le<std::uint8_t>(in);
    if (f > 2) throw IoError("bad family tag");
    ds.params[i].family = static_cast<Family>(f);
    ds.params[i].a = io::read_le<double>(in);
    ds.params[i].h = io::read_le<double>(in);
    ds.sample_seeds[i] = io::read_le<std::uint64_t>(in);
  }
  ds.inputs = read_matrix_binary(in, n, ds.grid_in.size());
  ds.clean_outputs = read_matrix_binary(in, n, ds.grid_out.size());
  ds.noisy_outputs = read_matrix_binary(in, n, ds.grid_out.size());
  const auto meta = io::read_le<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < meta; ++i) {
    std::string k = io::read_string(in);
    ds.metadata[k] = io::read_string(in);
  }
  ds.validate();
  return ds;
}

namespace {

void write_matrix_csv(std::ostream& out, std::string_view name, const Eigen::MatrixXd& m) {
  out << '[' << name << "]\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << m(r, c);
    }
    out << '\n';
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::uint64_t parse_u64(const std::string& s) { return std::stoull(s); }

}  // namespace

void write_dataset_csv(std::ostream& out, const FunctionPairDataset& ds) {
  ds.validate();
  out << "# aenet dataset v1\n" << std::setprecision(17);
  out << "[header]\n";
  out << "family," << to_string(ds.family) << '\n';
  out << "size," << ds.size() << '\n';
  out << "noise_sigma," << format_double(ds.noise_sigma) << '\n';
  out << "noise_seed," << ds.noise_seed << '\n';
  out << "dataset_seed," << ds.dataset_seed << '\n';
  auto grid_row = [&](std::string_view side, const Grid1D& g) {
    out << "grid_" << side << ',' << format_double(g.x_lo()) << ','
        << format_double(g.x_hi()) << ',' << g.size() << ',' << to_string(g.topology())
        << '\n';
  };
  grid_row("in", ds.grid_in);
  grid_row("out", ds.grid_out);
  out << "[metadata]\n";
  for (const auto& [k, v] : ds.metadata) out << k << ',' << v << '\n';
  out << "[params]\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << to_string(ds.params[i].family) << ',' << format_double(ds.params[i].a) << ','
        << format_double(ds.params[i].h) << ',' << ds.sample_seeds[i] << '\n';
  }
  write_matrix_csv(out, "inputs", ds.inputs);
  write_matrix_csv(out, "clean_outputs", ds.clean_outputs);
  write_matrix_csv(out, "noisy_outputs", ds.noisy_outputs);
}

FunctionPairDataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "# aenet dataset v1") {
    throw IoError("dataset CSV: missing version line");
  }
  FunctionPairDataset ds;
  std::string section;
  std::size_t n = 0;
  std::vector<std::vector<double>> rows;
  auto flush_matrix = [&]() {
    if (section != "inputs" && section != "clean_outputs" && section != "noisy_outputs") return;
    const std::size_t cols = section == "inputs" ? ds.grid_in.size() : ds.grid_out.size();
    if (rows.size() != n) throw IoError("dataset CSV: section " + section + " has wrong row count");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < n; ++r) {
      if (rows[r].size() != cols) throw IoError("dataset CSV: ragged row in " + section);
      for (std::size_t c = 0; c < cols; ++c) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
      }
    }
    if (section == "inputs") ds.inputs = std::move(m);
    else if (section == "clean_outputs") ds.clean_outputs = std::move(m);
    else ds.noisy_outputs = std::move(m);
    rows.clear();
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      flush_matrix();
      section = line.substr(1, line.size() - 2);
      continue;
    }
    auto f = split_csv(line);
    if (section == "header") {
      if (f.size() < 2) throw IoError("dataset CSV: malformed header row");
      if (f[0] == "family") ds.family = family_from_string(f[1]);
      else if (f[0] == "size") n = std::stoul(f[1]);
      else if (f[0] == "noise_sigma") ds.noise_sigma = std::strtod(f[1].c_str(), nullptr);
      else if (f[0] == "noise_seed") ds.noise_seed = parse_u64(f[1]);
      else if (f[0] == "dataset_seed") ds.dataset_seed = parse_u64(f[1]);
      else if (f[0] == "grid_in" || f[0] == "grid_out") {
        if (f.size() != 5) throw IoError("dataset CSV: malformed grid row");
        Grid1D g(std::strtod(f[1].c_str(), nullptr), std::strtod(f[2].c_str(), nullptr),
                 std::stoul(f[3]), topology_from_string(f[4]));
        (f[0] == "grid_in" ? ds.grid_in : ds.grid_out) = g;
      }
    } else if (section == "metadata") {
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw IoError("dataset CSV: malformed metadata row");
      ds.metadata[line.substr(0, comma)] = line.substr(comma + 1);
    } else if (section == "params") {
      if (f.size() != 4) throw IoError("dataset CSV: malformed params row");
      ds.params.push_back({family_from_string(f[0]), std::strtod(f[1].c_str(), nullptr),
                           std::strtod(f[2].c_str(), nullptr)});
      ds.sample_seeds.push_back(parse_u64(f[3]));
    } else {
      std::vector<double> row;
      row.reserve(f.size());
      for (const auto& s : f) row.push_back(std::strtod(s.c_str(), nullptr));
      rows.push_back(std::move(row));
    }
  }
  flush_matrix();
  ds.validate();
  return ds;
}

}  // namespace aenet
