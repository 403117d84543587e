#include "aenet/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "aenet/errors.hpp"

namespace aenet {

namespace {
// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  std::vector<double> real_buf;
  std::vector<Complex> complex_buf;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

RealFft::RealFft(std::size_t n) : n_(n), plans_(std::make_unique<Plans>()) {
  if (n < 2) throw ConfigError("FFT size must be >= 2");
  plans_->real_buf.resize(n);
  plans_->complex_buf.resize(n / 2 + 1);
  auto* rb = plans_->real_buf.data();
  auto* cb = reinterpret_cast<fftw_complex*>(plans_->complex_buf.data());
  std::lock_guard lock(planner_mutex());
  const int size = static_cast<int>(n);
  plans_->r2c = fftw_plan_dft_r2c_1d(size, rb, cb, FFTW_ESTIMATE);
  plans_->c2r = fftw_plan_dft_c2r_1d(size, cb, rb, FFTW_ESTIMATE);
  if (!plans_->r2c || !plans_->c2r) throw ConfigError("FFTW planning failed");
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> x, std::span<Complex> spectrum) {
  if (x.size() != n_ || spectrum.size() != spectrum_size()) {
    throw DimensionError("RealFft::forward size mismatch");
  }
  std::copy(x.begin(), x.end(), plans_->real_buf.begin());
  fftw_execute(plans_->r2c);
  std::copy(plans_->complex_buf.begin(), plans_->complex_buf.end(), spectrum.begin());
}

void RealFft::inverse(std::span<const Complex> spectrum, std::span<double> x) {
  if (x.size() != n_ || spectrum.size() != spectrum_size()) {
    throw DimensionError("RealFft::inverse size mismatch");
  }
  // c2r overwrites its input, hence the copy into the plan buffer.
  std::copy(spectrum.begin(), spectrum.end(), plans_->complex_buf.begin());
  fftw_execute(plans_->c2r);
  const double scale = 1.0 / static_cast<double>(n_);
  std::transform(plans_->real_buf.begin(), plans_->real_buf.end(), x.begin(),
                 [scale](double v) { return v * scale; });
}

std::vector<double> wavenumbers(std::size_t n, double length) {
  std::vector<double> k(n / 2 + 1);
  for (std::size_t m = 0; m < k.size(); ++m) {
    k[m] = 2.0 * std::numbers::pi * static_cast<double>(m) / length;
  }
  return k;
}

std::vector<double> spectral_shift(std::span<const double> values,
                                   double length, double shift) {
  const std::size_t n = values.size();
  RealFft fft(n);
  std::vector<Complex> spec(fft.spectrum_size());
  fft.forward(values, spec);
  const auto k = wavenumbers(n, length);
  for (std::size_t m = 0; m < spec.size(); ++m) {
    spec[m] *= std::polar(1.0, -k[m] * shift);
  }
  if (n % 2 == 0) {
    // The Nyquist mode only carries its cosine part on the nodes.
    spec.back() = Complex(spec.back().real(), 0.0);
  }
  std::vector<double> out(n);
  fft.inverse(spec, out);
  return out;
}

namespace {

// phi-function coefficients by contour averaging around each z.
struct EtdCoefficients {
  Complex q, f1, f2, f3;
};

EtdCoefficients etd_coefficients(Complex z, double dt) {
  constexpr int kContour = 64;
  Complex q = 0, f1 = 0, f2 = 0, f3 = 0;
  for (int j = 0; j < kContour; ++j) {
    const double theta = 2.0 * std::numbers::pi * (j + 0.5) / kContour;
    const Complex r = z + std::polar(1.0, theta);
    const Complex er = std::exp(r);
    const Complex r3 = r * r * r;
    q += (std::exp(r / 2.0) - 1.0) / r;
    f1 += (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3;
    f2 += (2.0 + r + er * (r - 2.0)) / r3;
    f3 += (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3;
  }
  const double s = dt / kContour;
  // Real z gives conjugate-symmetric sums; keep the imaginary part in general.
  return {q * s, f1 * s, f2 * s, f3 * s};
}

}  // namespace

Etdrk4::Etdrk4(std::size_t n, double length, std::vector<Complex> linear, double dt)
    : n_(n), dt_(dt), fft_(n) {
  const std::size_t modes = n / 2 + 1;
  if (linear.size() != modes) throw DimensionError("ETDRK4: linear operator size");
  if (!(dt > 0)) throw ConfigError("ETDRK4: dt must be positive");
  const auto k = wavenumbers(n, length);
  const std::size_t cutoff = n / 3;
  deriv_.resize(modes);
  mask_.resize(modes);
  e_.resize(modes);
  e2_.resize(modes);
  q_.resize(modes);
  f1_.resize(modes);
  f2_.resize(modes);
  f3_.resize(modes);
  for (std::size_t m = 0; m < modes; ++m) {
    mask_[m] = m <= cutoff ? 1.0 : 0.0;
    deriv_[m] = Complex(0.0, -0.5 * k[m]) * mask_[m];
    const Complex z = dt * linear[m];
    e_[m] = std::exp(z);
    e2_[m] = std::exp(z / 2.0);
    const auto c = etd_coefficients(z, dt);
    q_[m] = c.q;
    f1_[m] = c.f1;
    f2_[m] = c.f2;
    f3_[m] = c.f3;
  }
  physical_.resize(n);
  spectral_.resize(modes);
}

void Etdrk4::nonlinear(std::span<const Complex> v, std::span<Complex> out) {
  for (std::size_t m = 0; m < v.size(); ++m) spectral_[m] = v[m] * mask_[m];
  fft_.inverse(spectral_, physical_);
  for (double& u : physical_) u *= u;
  fft_.forward(physical_, out);
  for (std::size_t m = 0; m < out.size(); ++m) out[m] *= deriv_[m];
}

std::vector<double> Etdrk4::integrate(std::span<const double> u0, long steps) {
  if (u0.size() != n_) throw DimensionError("ETDRK4: initial state size");
  const std::size_t modes = n_ / 2 + 1;
  std::vector<Complex> v(modes), nv(modes), a(modes), na(modes), b(modes),
      nb(modes), c(modes), nc(modes);
  fft_.forward(u0, v);
  for (long step = 0; step < steps; ++step) {
    nonlinear(v, nv);
    for (std::size_t m = 0; m < modes; ++m) a[m] = e2_[m] * v[m] + q_[m] * nv[m];
    nonlinear(a, na);
    for (std::size_t m = 0; m < modes; ++m) b[m] = e2_[m] * v[m] + q_[m] * na[m];
    nonlinear(b, nb);
    for (std::size_t m = 0; m < modes; ++m) {
      c[m] = e2_[m] * a[m] + q_[m] * (2.0 * nb[m] - nv[m]);
    }
    nonlinear(c, nc);
    double norm = 0.0;
    for (std::size_t m = 0; m < modes; ++m) {
      v[m] = e_[m] * v[m] + nv[m] * f1_[m] + 2.0 * (na[m] + nb[m]) * f2_[m] +
             nc[m] * f3_[m];
      norm += std::abs(v[m]);
    }
    if (!std::isfinite(norm)) {
      throw SolverError("spectral solver blew up at step " + std::to_string(step));
    }
  }
  std::vector<double> u(n_);
  fft_.inverse(v, u);
  return u;
}

}  // namespace aenet
