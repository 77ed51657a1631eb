#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "siac/error.hpp"
#include "siac/kernel.hpp"
#include "siac/quadrature.hpp"

namespace siac {

/// Solved coefficients of the unshifted (symmetric) kernel with r+1 splines.
inline const std::vector<double> &symmetric_coefficients(int r, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::vector<double>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({r, order});
  if (it == cache.end()) {
    KernelSpec spec;
    spec.r = r;
    spec.order = order;
    spec.mode = BoundaryMode::periodic;
    it = cache.emplace(std::pair{r, order}, solve_coefficients(build_knot_matrix(spec, 0.0), order))
             .first;
  }
  return it->second;
}

/// Closed-form Fourier transform of the symmetric kernel with constant H:
/// sinc(kH/2)^l * (c_mid + 2 sum_g c_{mid+g} cos(g k H)).
inline double analytic_kernel_fourier(int r, int order, double H, double k) {
  if (!(H > 0.0))
    throw InvalidInput("kernel scaling H must be positive");
  if (r < 0 || order < 1)
    throw InvalidInput("kernel needs r >= 0 and order >= 1");
  if (r % 2 != 0)
    throw UnsupportedConfiguration(
        "closed-form response needs an odd number of B-splines (even r); got r = " +
        std::to_string(r));
  const auto &c = symmetric_coefficients(r, order);
  const double z = 0.5 * k * H;
  const double sinc = std::abs(z) < 1e-8 ? 1.0 - z * z / 6.0 : std::sin(z) / z;
  const auto mid = static_cast<std::size_t>(r / 2);
  double sum = c[mid];
  for (std::size_t g = 1; g <= mid; ++g)
    sum += 2.0 * c[mid + g] * std::cos(static_cast<double>(g) * k * H);
  return std::pow(sinc, order) * sum;
}

/// Integral of K_H(u) cos(k u) over the kernel support by fine Gauss
/// quadrature on every knot interval.
inline double numerical_kernel_fourier(const Kernel &kernel, double k) {
  if (kernel.knots.shift != 0.0)
    throw UnsupportedConfiguration("Fourier response is only defined for the symmetric kernel");
  const auto breaks = kernel.unscaled_breaks();
  constexpr int kSubpanels = 16;
  constexpr std::size_t kNodes = 20;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double t0 = breaks[i];
    const double dt = (breaks[i + 1] - t0) / kSubpanels;
    for (int s = 0; s < kSubpanels; ++s) {
      const double lo = kernel.H * (t0 + s * dt);
      const double hi = kernel.H * (t0 + (s + 1) * dt);
      sum += integrate_gauss([&](double u) { return kernel(u) * std::cos(k * u); }, lo, hi, kNodes);
    }
  }
  return sum;
}

struct Spectrum {
  std::vector<double> k;          // 2 pi m / (N dx)
  std::vector<double> amplitudes; // single-sided magnitudes
  bool windowed = false;
};

/// Symmetric Hann weights 0.5 (1 - cos(2 pi n / (N - 1))).
inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2)
    return w;
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                 static_cast<double>(n - 1)));
  return w;
}

/// Single-sided amplitude spectrum: |DFT| / N for modes 0..N/2, doubled
/// except at DC and Nyquist.
inline Spectrum amplitude_spectrum(std::span<const double> values, double dx, bool apply_window) {
  const std::size_t n = values.size();
  if (n < 2)
    throw InvalidInput("amplitude spectrum needs at least two samples");
  if (!(dx > 0.0))
    throw InvalidInput("amplitude spectrum needs dx > 0");

  std::vector<double> data(values.begin(), values.end());
  if (apply_window) {
    const auto w = hann_window(n);
    for (std::size_t i = 0; i < n; ++i)
      data[i] *= w[i];
  }

  // Direct DFT with an exact twiddle table indexed by (m * j) mod N.
  std::vector<double> cos_table(n);
  std::vector<double> sin_table(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    cos_table[j] = std::cos(angle);
    sin_table[j] = std::sin(angle);
  }

  const std::size_t modes = n / 2 + 1;
  Spectrum out;
  out.windowed = apply_window;
  out.k.resize(modes);
  out.amplitudes.resize(modes);
  const double length = static_cast<double>(n) * dx;
  for (std::size_t m = 0; m < modes; ++m) {
    double re = 0.0;
    double im = 0.0;
    std::size_t idx = 0;
    for (std::size_t j = 0; j < n; ++j) {
      re += data[j] * cos_table[idx];
      im -= data[j] * sin_table[idx];
      idx += m;
      if (idx >= n)
        idx -= n;
    }
    double amp = std::hypot(re, im) / static_cast<double>(n);
    const bool nyquist = (n % 2 == 0) && m == n / 2;
    if (m != 0 && !nyquist)
      amp *= 2.0;
    out.k[m] = 2.0 * std::numbers::pi * static_cast<double>(m) / length;
    out.amplitudes[m] = amp;
  }
  return out;
}

} // namespace siac
