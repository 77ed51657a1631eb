#pragma once

// Bohm speed and its beta correction factor from (optionally filtered) plasma
// moment profiles. Everything is in normalised units unless Z, m_i and e are
// set to physical values.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "siac/convolution.hpp"
#include "siac/error.hpp"
#include "siac/grid_init.hpp"
#include "siac/kernel.hpp"

namespace siac {

enum class Moment : std::size_t {
  q_n_e,
  q_n_i,
  Q_ee,
  Q_ei,
  Q_ii,
  E,
  R_T,
  n_e,
  n_i,
  u_ex,
  u_ix,
  T_ex,
  T_ix,
};

inline constexpr std::size_t kMomentCount = 13;

/// Column names used in moment tables and scaling files.
inline constexpr std::array<std::string_view, kMomentCount> kMomentNames = {
    "q_n_e", "q_n_i", "Q_ee", "Q_ei", "Q_ii", "E",    "R_T",
    "n_e",   "n_i",   "u_ex", "u_ix", "T_ex", "T_ix",
};

/// Per-variable kernel scalings in multiples of the grid spacing, tuned on a
/// time-averaged sheath data set.
inline constexpr std::array<double, kMomentCount> kDefaultScalingCells = {
    8, 4, 16, 16, 16, 2, 32, 6, 6, 8, 8, 16, 4,
};

inline std::optional<Moment> moment_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kMomentCount; ++i)
    if (kMomentNames[i] == name)
      return static_cast<Moment>(i);
  return std::nullopt;
}

inline std::string_view moment_name(Moment m) { return kMomentNames[static_cast<std::size_t>(m)]; }

/// The 13 profiles on one uniform grid of cell centres.
struct MomentSet {
  std::vector<double> xs;
  std::array<std::vector<double>, kMomentCount> profiles;

  std::vector<double> &operator[](Moment m) { return profiles[static_cast<std::size_t>(m)]; }
  const std::vector<double> &operator[](Moment m) const {
    return profiles[static_cast<std::size_t>(m)];
  }

  std::size_t size() const { return xs.size(); }
  double dx() const { return (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1); }
  double domain_lo() const { return xs.front() - 0.5 * dx(); }
  double domain_hi() const { return xs.back() + 0.5 * dx(); }

  void validate() const {
    if (xs.size() < 2)
      throw InvalidInput("moment set needs at least two grid points");
    for (std::size_t i = 0; i < kMomentCount; ++i)
      if (profiles[i].size() != xs.size())
        throw InvalidInput("moment profile " + std::string(kMomentNames[i]) + " has " +
                           std::to_string(profiles[i].size()) + " values for " +
                           std::to_string(xs.size()) + " grid points");
    const double h = dx();
    if (!(h > 0.0))
      throw InvalidInput("moment grid must be increasing");
    for (std::size_t j = 1; j < xs.size(); ++j)
      if (std::abs((xs[j] - xs[j - 1]) - h) > 1e-6 * h)
        throw InvalidInput("moment grid must be uniform (spacing differs at index " +
                           std::to_string(j) + ")");
  }
};

struct BohmConfig {
  double Z = 1.0;
  double m_i = 1.0;
  double e_charge = 1.0;
  std::array<double, kMomentCount> scaling_cells = kDefaultScalingCells;
  int r = 2;
  int order = 2;
  bool generalized_spline = true;
  bool adaptive = false;
  double eps_den = 1e-12;
  double eps_E = 1e-12;
  double eps_Gamma = 1e-12;

  double &scaling(Moment m) { return scaling_cells[static_cast<std::size_t>(m)]; }
  double scaling(Moment m) const { return scaling_cells[static_cast<std::size_t>(m)]; }

  void validate() const {
    if (!(Z > 0.0) || !(m_i > 0.0) || !(e_charge > 0.0))
      throw InvalidInput("Z, m_i and e must be positive");
    for (std::size_t i = 0; i < kMomentCount; ++i)
      if (!(scaling_cells[i] > 0.0))
        throw InvalidInput("kernel scaling for " + std::string(kMomentNames[i]) +
                           " must be positive");
  }
};

enum class Validity : int { real = 0, complex_modulus = 1, degenerate = 2 };

struct BohmResult {
  std::vector<double> u_bohm;
  std::vector<double> beta;
  std::vector<Validity> validity;

  std::size_t count(Validity v) const {
    std::size_t n = 0;
    for (auto f : validity)
      n += f == v ? 1 : 0;
    return n;
  }
};

/// Central differences inside, first-order one-sided differences at the ends.
inline std::vector<double> gradient(std::span<const double> values, double dx) {
  const std::size_t n = values.size();
  if (n < 2)
    throw InvalidInput("gradient needs at least two values");
  if (!(dx > 0.0))
    throw InvalidInput("gradient needs dx > 0");
  std::vector<double> out(n);
  out[0] = (values[1] - values[0]) / dx;
  out[n - 1] = (values[n - 1] - values[n - 2]) / dx;
  for (std::size_t j = 1; j + 1 < n; ++j)
    out[j] = (values[j + 1] - values[j - 1]) / (2.0 * dx);
  return out;
}

/// Pointwise beta. Points where E, a particle flux, the thermal-force
/// denominator or the beta denominator fall below tolerance are NaN.
inline std::vector<double> compute_beta(const MomentSet &m, const BohmConfig &cfg) {
  m.validate();
  cfg.validate();
  const double h = m.dx();
  const auto dqe = gradient(m[Moment::q_n_e], h);
  const auto dqi = gradient(m[Moment::q_n_i], h);
  const auto dTe = gradient(m[Moment::T_ex], h);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double Ze = cfg.Z * cfg.e_charge;

  std::vector<double> beta(m.size());
  for (std::size_t j = 0; j < m.size(); ++j) {
    const double E = m[Moment::E][j];
    const double gamma_e = m[Moment::n_e][j] * m[Moment::u_ex][j];
    const double gamma_i = m[Moment::n_i][j] * m[Moment::u_ix][j];
    if (std::abs(E) < cfg.eps_E || std::abs(gamma_e) < cfg.eps_Gamma ||
        std::abs(gamma_i) < cfg.eps_Gamma) {
      beta[j] = nan;
      continue;
    }
    const double R_T = m[Moment::R_T][j];
    double alpha = 0.0;
    if (R_T != 0.0) {
      const double alpha_den = m[Moment::n_e][j] * dTe[j];
      if (std::abs(alpha_den) < cfg.eps_den) {
        beta[j] = nan;
        continue;
      }
      alpha = -R_T / alpha_den;
    }
    const double electron = -dqe[j] / E + (m[Moment::Q_ee][j] + m[Moment::Q_ei][j]) / E;
    const double ion = -dqi[j] / E + m[Moment::Q_ii][j] / E;
    const double numerator = 3.0 - (3.0 + 2.0 * alpha) / (Ze * gamma_i) * ion +
                             alpha / (cfg.e_charge * gamma_e) * electron;
    const double denominator = 1.0 + (1.0 + alpha) / (cfg.e_charge * gamma_e) * electron;
    if (std::abs(denominator) < cfg.eps_den) {
      beta[j] = nan;
      continue;
    }
    beta[j] = numerator / denominator;
  }
  return beta;
}

/// u = sqrt((Z beta T_ex + 3 T_ix) / m_i); a negative radicand reports the
/// modulus of the complex root and is flagged.
inline BohmResult compute_bohm_speed(const MomentSet &m, const BohmConfig &cfg) {
  BohmResult out;
  out.beta = compute_beta(m, cfg);
  out.u_bohm.resize(m.size());
  out.validity.resize(m.size());
  for (std::size_t j = 0; j < m.size(); ++j) {
    const double beta = out.beta[j];
    if (std::isnan(beta)) {
      out.u_bohm[j] = std::numeric_limits<double>::quiet_NaN();
      out.validity[j] = Validity::degenerate;
      continue;
    }
    const double radicand = (cfg.Z * beta * m[Moment::T_ex][j] + 3.0 * m[Moment::T_ix][j]) / cfg.m_i;
    out.u_bohm[j] = std::sqrt(std::abs(radicand));
    out.validity[j] = radicand < 0.0 ? Validity::complex_modulus : Validity::real;
  }
  return out;
}

/// Kernel used for the moment profiles: position dependent, with the
/// generalized spline and scaling mode taken from the config.
inline KernelSpec moment_kernel_template(const BohmConfig &cfg) {
  KernelSpec spec;
  spec.r = cfg.r;
  spec.order = cfg.order;
  spec.generalized_spline = cfg.generalized_spline;
  spec.mode = BoundaryMode::position_dependent;
  spec.scaling = cfg.adaptive ? Scaling{AdaptiveScaling{}} : Scaling{ConstantScaling{}};
  return spec;
}

namespace detail {

template <class E>
[[noreturn]] void rethrow_for_variable(const E &e, std::string_view name) {
  throw E("filtering " + std::string(name) + ": " + e.what());
}

} // namespace detail

/// Filter every profile with its own scaling H = cells * dx. The template
/// supplies r, l, the generalized-spline flag, boundary mode and scaling kind.
inline MomentSet filter_moments(const MomentSet &m, const BohmConfig &cfg,
                                const KernelSpec &tmpl, unsigned threads = 0) {
  m.validate();
  cfg.validate();
  const double h = m.dx();
  MomentSet out;
  out.xs = m.xs;
  for (std::size_t i = 0; i < kMomentCount; ++i) {
    const auto name = kMomentNames[i];
    try {
      PointwiseData data{m.domain_lo(), m.domain_hi(), m.xs, m.profiles[i]};
      const bool periodic = tmpl.mode == BoundaryMode::periodic;
      const auto interp = piecewise_constant(data, periodic);
      KernelSpec spec = tmpl;
      spec.domain_lo = data.domain_lo;
      spec.domain_hi = data.domain_hi;
      const double H = cfg.scaling_cells[i] * h;
      if (tmpl.is_adaptive())
        spec.scaling = AdaptiveScaling{H, h};
      else
        spec.scaling = ConstantScaling{H};
      out.profiles[i] = filter_grid(interp, spec, m.xs, threads);
    } catch (const DegenerateKernel &e) {
      detail::rethrow_for_variable(e, name);
    } catch (const UnsupportedConfiguration &e) {
      detail::rethrow_for_variable(e, name);
    } catch (const DomainError &e) {
      detail::rethrow_for_variable(e, name);
    } catch (const InvalidInput &e) {
      detail::rethrow_for_variable(e, name);
    }
  }
  return out;
}

inline MomentSet filter_moments(const MomentSet &m, const BohmConfig &cfg, unsigned threads = 0) {
  return filter_moments(m, cfg, moment_kernel_template(cfg), threads);
}

} // namespace siac
