#pragma once

// Fourier machinery for periodic 1-D problems: a real FFT wrapper and a
// fourth-order exponential time-differencing Runge-Kutta (ETDRK4) integrator
// for  v_t = L v + N(v)  with diagonal L in Fourier space.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace aenet {

using Complex = std::complex<double>;

/// Real-to-complex FFT of fixed size n. forward() is unnormalized and
/// produces n/2 + 1 coefficients; inverse() divides by n. Instances own
/// scratch buffers and must not be shared across threads.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t spectrum_size() const { return n_ / 2 + 1; }

  void forward(std::span<const double> x, std::span<Complex> spectrum);
  void inverse(std::span<const Complex> spectrum, std::span<double> x);

 private:
  struct Plans;
  std::size_t n_;
  std::unique_ptr<Plans> plans_;
};

/// Angular wavenumbers 2 pi m / length for m = 0..n/2.
std::vector<double> wavenumbers(std::size_t n, double length);

/// Shifts a periodic sample vector by `shift` (in domain units, positive
/// moves features to the right): returns u(x - shift) sampled on the same
/// nodes, exact for trigonometric polynomials resolved by the grid.
std::vector<double> spectral_shift(std::span<const double> values,
                                   double length, double shift);

/// ETDRK4 for semilinear PDEs u_t = L u - (u^2 / 2)_x on a periodic domain,
/// with the quadratic term dealiased by the 2/3 rule.
class Etdrk4 {
 public:
  /// `linear` holds the diagonal of L for the n/2 + 1 real-FFT modes.
  Etdrk4(std::size_t n, double length, std::vector<Complex> linear, double dt);

  double dt() const { return dt_; }

  /// Advances `u0` by `steps` steps. Throws SolverError on non-finite state.
  std::vector<double> integrate(std::span<const double> u0, long steps);

 private:
  void nonlinear(std::span<const Complex> v, std::span<Complex> out);

  std::size_t n_;
  double dt_;
  RealFft fft_;
  std::vector<Complex> deriv_;  // -i k / 2, zero outside the retained band
  std::vector<double> mask_;
  std::vector<Complex> e_, e2_, q_, f1_, f2_, f3_;
  std::vector<double> physical_;
  std::vector<Complex> spectral_;
};

}  // namespace aenet
