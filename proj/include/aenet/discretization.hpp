#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "aenet/rng.hpp"

namespace aenet {

enum class Topology { closed, periodic };

std::string_view to_string(Topology t);
Topology topology_from_string(std::string_view s);

/// Uniform 1-D grid.
///
/// Closed grids include both endpoints, x_i = lo + i (hi - lo) / (n - 1).
/// Periodic grids are half-open [lo, hi), x_i = lo + i (hi - lo) / n.
class Grid1D {
 public:
  Grid1D(double x_lo, double x_hi, std::size_t n, Topology topology);

  static Grid1D closed(double x_lo, double x_hi, std::size_t n) {
    return {x_lo, x_hi, n, Topology::closed};
  }
  static Grid1D periodic(double x_lo, double x_hi, std::size_t n) {
    return {x_lo, x_hi, n, Topology::periodic};
  }

  double x_lo() const { return x_lo_; }
  double x_hi() const { return x_hi_; }
  std::size_t size() const { return n_; }
  Topology topology() const { return topology_; }
  bool is_periodic() const { return topology_ == Topology::periodic; }
  double length() const { return x_hi_ - x_lo_; }
  double spacing() const;
  double node(std::size_t i) const;
  std::vector<double> nodes() const;

  std::string describe() const;

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double x_lo_;
  double x_hi_;
  std::size_t n_;
  Topology topology_;
};

enum class QuadratureKind { midpoint, trapezoid, simpson };

std::string_view to_string(QuadratureKind k);
QuadratureKind quadrature_kind_from_string(std::string_view s);

/// Positive weights w_i defining <u, v> = sum_i w_i u_i v_i on a grid.
class QuadratureRule {
 public:
  QuadratureRule(Grid1D grid, QuadratureKind kind, std::vector<double> weights);

  const Grid1D& grid() const { return grid_; }
  QuadratureKind kind() const { return kind_; }
  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }

  /// True when every weight is equal, so the weighted norm is a fixed
  /// multiple of the Euclidean norm.
  bool is_uniform() const;

 private:
  Grid1D grid_;
  QuadratureKind kind_;
  std::vector<double> weights_;
};

/// A function sampled at the nodes of a grid.
class DiscreteFunction {
 public:
  DiscreteFunction(Grid1D grid, std::vector<double> values);

  const Grid1D& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  Eigen::Map<const Eigen::VectorXd> as_vector() const {
    return {values_.data(), static_cast<Eigen::Index>(values_.size())};
  }

 private:
  Grid1D grid_;
  std::vector<double> values_;
};

using ScalarFunction = std::function<double(double)>;

/// Samples f at every grid node. Throws EvaluationError on a non-finite
/// value, naming the node.
DiscreteFunction discretize(const ScalarFunction& f, const Grid1D& grid);

QuadratureRule make_quadrature(const Grid1D& grid, QuadratureKind kind);

double weighted_inner(const DiscreteFunction& u, const DiscreteFunction& v,
                      const QuadratureRule& rule);
double weighted_norm(const DiscreteFunction& u, const QuadratureRule& rule);

// Raw-vector variants used on dataset rows; sizes must match the rule.
double weighted_inner(std::span<const double> u, std::span<const double> v,
                      const QuadratureRule& rule);
double weighted_norm(std::span<const double> u, const QuadratureRule& rule);

enum class InterpMethod { piecewise_constant, linear, cubic };

std::string_view to_string(InterpMethod m);
InterpMethod interp_method_from_string(std::string_view s);

/// Resamples u onto the target grid.
///
/// Cubic uses a not-a-knot spline on closed grids and a periodic spline on
/// periodic grids. Periodic sources wrap; closed sources clamp to the end
/// values for targets up to one source spacing outside the domain and
/// throw RangeError beyond that.
DiscreteFunction interpolate(const DiscreteFunction& u, const Grid1D& target,
                             InterpMethod method);

struct NormEquivalenceReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  // Ratio discrete/continuum farthest from 1 in log scale.
  double worst_ratio = 1.0;
};

/// A complex-valued test function together with its exact L2 norm.
struct SampledFunction {
  std::function<std::complex<double>(double)> f;
  double l2_norm = 0.0;
};

using FunctionSampler = std::function<SampledFunction(Rng&)>;

/// Checks 0.5 ||u|| <= ||S(u)||_S <= 2 ||u|| for `trials` draws from the
/// sampler. Complex functions are handled as (real, imag) pairs.
NormEquivalenceReport verify_norm_equivalence(const FunctionSampler& sampler,
                                              const Grid1D& grid,
                                              const QuadratureRule& rule,
                                              std::size_t trials,
                                              std::uint64_t seed);

/// Trigonometric polynomials sum_{|k|<=N} a_k e^{2 pi i k x} on [0, 1) with
/// a <= |a_k| <= A and uniform random phase.
FunctionSampler fourier_family_sampler(int max_mode, double coef_lo,
                                       double coef_hi);

/// Largest grid spacing for which the Fourier family above is guaranteed to
/// satisfy the 0.5 / 2 norm equivalence.
double fourier_family_max_spacing(int max_mode, double coef_lo, double coef_hi);

/// `count` scales geometrically spaced from `largest` down to `smallest`.
std::vector<double> geometric_scales(double largest, double smallest,
                                     std::size_t count);

/// How N(eps) is counted. `lattice` counts occupied cells of the fixed grid
/// of axis-aligned boxes of side eps. `cover` counts the boxes of side eps
/// (sup-norm balls of radius eps/2) in a greedy cover centred on the points;
/// it approximates the fewest-balls count and does not saturate on
/// high-dimensional data the way lattice cells do.
enum class BoxCount { lattice, cover };

/// Box-counting (Minkowski) dimension of the rows of `points`: least-squares
/// slope of log N(eps) against log(1/eps).
double box_counting_dimension(const Eigen::MatrixXd& points,
                              std::span<const double> scales,
                              BoxCount method = BoxCount::lattice);

std::size_t count_occupied_boxes(const Eigen::MatrixXd& points, double scale);
std::size_t count_covering_boxes(const Eigen::MatrixXd& points, double scale);

// Serialization. The CSV layout is a header line, the grid descriptor row
// (x_lo, x_hi, n, topology) and one value per line; doubles are printed with
// 17 significant digits so the round trip is exact.
void write_csv(std::ostream& out, const DiscreteFunction& u);
DiscreteFunction read_csv_function(std::istream& in);
void write_binary(std::ostream& out, const DiscreteFunction& u);
DiscreteFunction read_binary_function(std::istream& in);

void write_grid_binary(std::ostream& out, const Grid1D& grid);
Grid1D read_grid_binary(std::istream& in);

}  // namespace aenet
