#pragma once

// Initial-condition families, PDE solution operators and dataset assembly
// for the transport, viscous Burgers' and KdV experiments.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "aenet/discretization.hpp"

namespace aenet {

enum class Family { transport, burgers, kdv };

std::string_view to_string(Family f);
Family family_from_string(std::string_view s);

/// Latent parameters (a, h) of one initial condition.
struct IntrinsicParams {
  Family family = Family::transport;
  double a = 0.0;
  double h = 0.0;

  /// Throws ConfigError when (a, h) leaves the family's parameter box.
  void validate() const;
};

struct ParamBox {
  double a_lo, a_hi, h_lo, h_hi;
};
ParamBox parameter_box(Family f);

/// Default grid of each family for n nodes: transport on closed [0, 1],
/// Burgers' on periodic [0, 1), KdV on periodic [0, 6).
Grid1D default_grid(Family f, std::size_t n);

// ---- transport -------------------------------------------------------------

inline constexpr double kHatWidth = 0.05;
inline constexpr double kTransportTime = 0.3;

/// Piecewise-linear hat of height alpha supported on [t, t + 0.05].
ScalarFunction hat(double alpha, double t);

/// Two-hat initial condition H_{a,0.1} + H_{2.5, 0.2 + 0.1 h}.
ScalarFunction transport_ic(const IntrinsicParams& p);

/// Exact solution of u_t = -u_x with zero inflow at x_lo: u(x, t) = g(x - t)
/// for x - t >= x_lo, else 0, sampled on `grid`.
DiscreteFunction solve_transport(const ScalarFunction& g, const Grid1D& grid,
                                 double t = kTransportTime);

// ---- Gaussian random fields ------------------------------------------------

/// Covariance amplitude * (-d^2/dx^2 + inverse_length^2 I)^{-decay} on a
/// periodic interval.
struct GrfSpec {
  double amplitude = 2401.0;  // 7^4
  double inverse_length = 7.0;
  double decay = 2.5;
  int cutoff = 0;  // highest mode; 0 means the grid's Nyquist mode

  /// Eigenvalue of the covariance for Fourier mode k on an interval of
  /// the given length.
  double eigenvalue(int k, double length = 1.0) const;
};

/// Truncated Karhunen-Loeve draw
///   w(x) = sum_k sqrt(lambda_k) (xi_k sqrt2 cos(2 pi k x) + eta_k sqrt2 sin(2 pi k x)).
DiscreteFunction sample_grf(const GrfSpec& spec, const Grid1D& grid,
                            std::uint64_t seed);

// ---- Burgers' --------------------------------------------------------------

/// g(x) = a w0(x - h) + sqrt(1 - a^2) w1(x - h), with the periodic shift
/// applied exactly through the trigonometric interpolant of w0 and w1.
/// Evaluates at arbitrary x, so it can be sampled on any grid.
ScalarFunction burgers_ic(const IntrinsicParams& p, const DiscreteFunction& w0,
                          const DiscreteFunction& w1);

/// Same initial condition sampled on the nodes of w0's grid via a Fourier
/// phase shift.
DiscreteFunction burgers_ic_on_grid(const IntrinsicParams& p,
                                    const DiscreteFunction& w0,
                                    const DiscreteFunction& w1);

inline constexpr double kBurgersViscosity = 1e-3;
inline constexpr double kBurgersTime = 1.0;
inline constexpr double kBurgersDt = 1e-3;

/// u_t = nu u_xx - u u_x on a periodic grid, integrated to `final_time`.
DiscreteFunction solve_burgers(const DiscreteFunction& g,
                               double nu = kBurgersViscosity,
                               double final_time = kBurgersTime,
                               double dt = kBurgersDt);

// ---- KdV -------------------------------------------------------------------

inline constexpr double kKdvTime = 0.01;
inline constexpr double kKdvDt = 1e-6;

/// (a^2/2) sech((a/2)(x - 1))^2 + (6^2/2) sech((6^2/2)(x - 2 - h))^2.
ScalarFunction kdv_ic(const IntrinsicParams& p);

/// u_t = -u_xxx - u u_x on a periodic grid, integrated to `final_time`.
DiscreteFunction solve_kdv(const DiscreteFunction& g,
                           double final_time = kKdvTime, double dt = kKdvDt);

/// Reusable solver for one family on fixed grids (precomputes integrator
/// coefficients). Not thread-safe; use one per worker.
class FamilySolver {
 public:
  FamilySolver(Family family, const Grid1D& grid, double dt = 0.0);
  ~FamilySolver();
  FamilySolver(FamilySolver&&) noexcept;
  FamilySolver& operator=(FamilySolver&&) noexcept;

  DiscreteFunction solve(const DiscreteFunction& g);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ---- datasets --------------------------------------------------------------

/// (input, clean output, noisy output) triples v_hat = v + eps, stored as
/// matrices whose rows are samples.
struct FunctionPairDataset {
  Family family = Family::transport;
  Grid1D grid_in = Grid1D::closed(0, 1, 2);
  Grid1D grid_out = Grid1D::closed(0, 1, 2);
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd clean_outputs;
  Eigen::MatrixXd noisy_outputs;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
  std::uint64_t dataset_seed = 0;
  std::vector<IntrinsicParams> params;
  std::vector<std::uint64_t> sample_seeds;
  std::map<std::string, std::string> metadata;

  std::size_t size() const { return params.size(); }
  DiscreteFunction input(std::size_t i) const;
  DiscreteFunction clean_output(std::size_t i) const;
  DiscreteFunction noisy_output(std::size_t i) const;

  /// The first n samples (nested subsets for sample-complexity sweeps).
  FunctionPairDataset head(std::size_t n) const;

  /// Throws when list lengths or matrix shapes disagree.
  void validate() const;
};

/// noisy = clean + N(0, sigma^2) i.i.d. per node and sample. The draw for
/// sample i depends only on (seed, i).
FunctionPairDataset add_noise(FunctionPairDataset ds, double sigma,
                              std::uint64_t seed);

/// The two fixed GRF draws defining the Burgers' family for a dataset seed.
std::pair<DiscreteFunction, DiscreteFunction> burgers_basis(const Grid1D& grid,
                                                            std::uint64_t seed);

struct DatasetSplit {
  FunctionPairDataset train;
  FunctionPairDataset test;
};

/// Samples (a, h) uniformly in the family box, solves the PDE and
/// discretizes. Noise goes into the training outputs only. Sample i of a
/// split is determined by (seed, split, i), so smaller n_train values give
/// prefixes of larger ones.
DatasetSplit make_dataset(Family family, std::size_t n_train, std::size_t n_test,
                          const Grid1D& grid_in, const Grid1D& grid_out,
                          double sigma, std::uint64_t seed, int workers = 1);

/// Regenerates the inputs of `reference` (same parameters) on another grid.
/// Used for grid-transfer evaluation.
Eigen::MatrixXd resample_inputs(const FunctionPairDataset& reference,
                                const Grid1D& grid);

/// Input initial condition for one parameter set as a function of x.
ScalarFunction family_ic(const IntrinsicParams& p, const Grid1D& native_grid,
                         std::uint64_t dataset_seed);

// Persistence: one file per split. Binary is compact; CSV is human-readable
// with 17-digit doubles. Both round-trip bit-exactly.
void write_dataset_binary(std::ostream& out, const FunctionPairDataset& ds);
FunctionPairDataset read_dataset_binary(std::istream& in);
void write_dataset_csv(std::ostream& out, const FunctionPairDataset& ds);
FunctionPairDataset read_dataset_csv(std::istream& in);

}  // namespace aenet
