#pragma once

// SIAC kernels: (r+1) B-splines of order l on a shifted knot matrix, optionally
// with one generalized boundary spline, scaled by a constant or adaptive H.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "siac/bspline.hpp"
#include "siac/error.hpp"

namespace siac {

enum class BoundaryMode { periodic, position_dependent };

struct ConstantScaling {
  double H = 1.0;
};

/// H_int in the interior, ramping to h_grid / (r + l) at both domain ends.
struct AdaptiveScaling {
  double H_int = 1.0;
  double h_grid = 1.0;
};

using Scaling = std::variant<ConstantScaling, AdaptiveScaling>;

struct KernelSpec {
  int r = 2;     // moments; the kernel has r + 1 principal B-splines
  int order = 2; // B-spline order l
  Scaling scaling = ConstantScaling{};
  bool generalized_spline = false;
  double domain_lo = 0.0;
  double domain_hi = 1.0;
  BoundaryMode mode = BoundaryMode::position_dependent;

  /// r + l: unscaled support width of the kernel.
  int support_width() const { return r + order; }
  double half_width() const { return 0.5 * support_width(); }
  double length() const { return domain_hi - domain_lo; }
  bool is_adaptive() const { return std::holds_alternative<AdaptiveScaling>(scaling); }

  void validate() const {
    if (r < 0)
      throw InvalidInput("kernel r must be >= 0");
    if (order < 1)
      throw InvalidInput("kernel B-spline order must be >= 1");
    if (!(domain_lo < domain_hi))
      throw InvalidInput("kernel domain must satisfy lo < hi");
    const double m = support_width();
    const double fit = length() * (1.0 + 1e-12);
    if (const auto *c = std::get_if<ConstantScaling>(&scaling)) {
      if (!(c->H > 0.0))
        throw InvalidInput("kernel scaling H must be positive");
      if (mode == BoundaryMode::position_dependent && c->H * m > fit)
        throw InvalidInput("kernel support H*(r+l) = " + std::to_string(c->H * m) +
                           " exceeds the domain length " + std::to_string(length()));
    } else {
      const auto &a = std::get<AdaptiveScaling>(scaling);
      if (mode == BoundaryMode::periodic)
        throw InvalidInput("adaptive scaling is only defined for position-dependent kernels");
      if (!(a.h_grid > 0.0))
        throw InvalidInput("adaptive scaling needs h_grid > 0");
      if (a.H_int < a.h_grid / m)
        throw InvalidInput("adaptive scaling needs H_int >= h_grid/(r+l)");
      if (a.H_int * m > fit)
        throw InvalidInput("interior kernel support H_int*(r+l) exceeds the domain length");
    }
    if (generalized_spline && mode == BoundaryMode::periodic)
      throw InvalidInput("generalized splines are only used with position-dependent kernels");
  }
};

/// Rows are the knot sequences of the constituent B-splines; shift is lambda.
struct KnotMatrix {
  std::vector<KnotSequence> rows;
  double shift = 0.0;

  std::size_t size() const { return rows.size(); }
  double min_knot() const {
    double v = rows.front().front();
    for (const auto &row : rows)
      v = std::min(v, row.front());
    return v;
  }
  double max_knot() const {
    double v = rows.front().back();
    for (const auto &row : rows)
      v = std::max(v, row.back());
    return v;
  }
};

/// Shifting function: zero where the symmetric support fits, otherwise the
/// translation that pins the support edge to the nearer domain end.
inline double shift_lambda(double x_star, const KernelSpec &spec, double H_at) {
  const double a = spec.domain_lo;
  const double b = spec.domain_hi;
  const double half = spec.half_width();
  if (x_star < 0.5 * (a + b))
    return std::min(0.0, -half + (x_star - a) / H_at);
  return std::max(0.0, half + (x_star - b) / H_at);
}

/// Unscaled knot matrix T(i, j) = -(r+l)/2 + i + j + lambda, with s_L appended
/// (lambda < 0) or s_R prepended (lambda > 0) when the generalized spline is on.
inline KnotMatrix build_knot_matrix(const KernelSpec &spec, double lambda) {
  const int r = spec.r;
  const int l = spec.order;
  const double half = spec.half_width();
  KnotMatrix T;
  T.shift = lambda;

  const bool gen = spec.generalized_spline && lambda != 0.0;
  if (gen && lambda > 0.0) {
    std::vector<double> s(static_cast<std::size_t>(l) + 1, lambda - half);
    s.back() = lambda - half + 1.0;
    T.rows.emplace_back(std::move(s));
  }
  for (int i = 0; i <= r; ++i) {
    std::vector<double> row(static_cast<std::size_t>(l) + 1);
    for (int j = 0; j <= l; ++j)
      row[static_cast<std::size_t>(j)] = -half + i + j + lambda;
    T.rows.emplace_back(std::move(row));
  }
  if (gen && lambda < 0.0) {
    std::vector<double> s(static_cast<std::size_t>(l) + 1, lambda + half);
    s.front() = lambda + half - 1.0;
    T.rows.emplace_back(std::move(s));
  }
  return T;
}

inline constexpr double kMaxCoefficientCondition = 1e12;

/// Coefficients c solving sum_g c_g b_{p,g} = delta_{p0} for p = 0..n, where
/// b_{p,g} is the p-th (-y) moment of row g and n + 1 is the row count.
inline std::vector<double> solve_coefficients(const KnotMatrix &T, int order) {
  const auto n = static_cast<Eigen::Index>(T.size());
  if (n == 0)
    throw InvalidInput("empty knot matrix");
  for (const auto &row : T.rows)
    if (row.order() != order)
      throw InvalidInput("knot matrix row does not match the B-spline order");

  Eigen::MatrixXd B(n, n);
  for (Eigen::Index g = 0; g < n; ++g)
    for (Eigen::Index p = 0; p < n; ++p)
      B(p, g) = bspline_moment(T.rows[static_cast<std::size_t>(g)], static_cast<int>(p));

  // Row equilibration: higher moments grow like |knot|^p.
  Eigen::VectorXd row_scale(n);
  for (Eigen::Index p = 0; p < n; ++p) {
    const double m = B.row(p).cwiseAbs().maxCoeff();
    row_scale(p) = m > 0.0 ? 1.0 / m : 1.0;
  }
  const Eigen::MatrixXd S = row_scale.asDiagonal() * B;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto &sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(n - 1);
  if (!(smin > 0.0) || smax / smin > kMaxCoefficientCondition) {
    std::ostringstream msg;
    msg << "degenerate kernel coefficient system (condition estimate "
        << (smin > 0.0 ? smax / smin : INFINITY) << ", shift " << T.shift << ")";
    throw DegenerateKernel(msg.str());
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(0) = row_scale(0);
  Eigen::VectorXd c = svd.solve(rhs);

  // Two rounds of refinement with the residual accumulated in long double.
  for (int round = 0; round < 2; ++round) {
    Eigen::VectorXd residual(n);
    for (Eigen::Index p = 0; p < n; ++p) {
      long double acc = p == 0 ? static_cast<long double>(rhs(0)) : 0.0L;
      for (Eigen::Index g = 0; g < n; ++g)
        acc -= static_cast<long double>(S(p, g)) * static_cast<long double>(c(g));
      residual(p) = static_cast<double>(acc);
    }
    c += svd.solve(residual);
  }
  return {c.data(), c.data() + n};
}

/// Eq.-9-style adaptive scaling: H_int where the symmetric support fits,
/// linear ramps down to h_grid/(r+l) exactly at the domain ends.
inline double adaptive_scaling(double x, const KernelSpec &spec) {
  const auto *ad = std::get_if<AdaptiveScaling>(&spec.scaling);
  if (ad == nullptr)
    throw InvalidInput("adaptive_scaling called on a constant-scaling spec");
  const double a = spec.domain_lo;
  const double b = spec.domain_hi;
  const double m = spec.support_width();
  const double reach = ad->H_int * m / 2.0;
  const double h0 = ad->h_grid / m;
  const bool left_fits = x - reach >= a;
  const bool right_fits = x + reach <= b;
  if (left_fits && right_fits)
    return ad->H_int;
  const bool use_left = !left_fits && (right_fits || x < 0.5 * (a + b));
  if (use_left)
    return h0 + 2.0 * (x - a) * (ad->H_int - h0) / (ad->H_int * m);
  return h0 + 2.0 * (x - b) * (-ad->H_int + h0) / (ad->H_int * m);
}

/// Scaling H(x_star) for either scaling mode.
inline double scaling_at(double x_star, const KernelSpec &spec) {
  if (const auto *c = std::get_if<ConstantScaling>(&spec.scaling))
    return c->H;
  return adaptive_scaling(x_star, spec);
}

/// Kernel built for one filtering point. Knots are stored unscaled; physical
/// evaluation applies t = u / H and the 1/H factor.
struct Kernel {
  KnotMatrix knots;
  std::vector<double> coeffs;
  double H = 1.0;
  double x_star = 0.0;

  /// Sum of c_g B_g(t) in unscaled coordinates.
  double eval_unscaled(double t) const {
    double v = 0.0;
    for (std::size_t g = 0; g < coeffs.size(); ++g)
      v += coeffs[g] * bspline_eval(knots.rows[g], t);
    return v;
  }

  /// K_H(u) = K(u / H) / H, integrating to one in physical coordinates.
  double operator()(double u) const { return eval_unscaled(u / H) / H; }

  /// Physical interval of y for which K_H(x_star - y) can be nonzero.
  double support_lo() const { return x_star - H * knots.max_knot(); }
  double support_hi() const { return x_star - H * knots.min_knot(); }

  /// Distinct unscaled knot values, ascending.
  std::vector<double> unscaled_breaks() const {
    std::vector<double> out;
    for (const auto &row : knots.rows)
      out.insert(out.end(), row.knots().begin(), row.knots().end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

inline double kernel_eval(const Kernel &k, double u) { return k(u); }

/// Builds kernels for one spec and memoizes coefficients for the symmetric
/// kernel and the two fully shifted plateaus. Safe for concurrent use.
class KernelBuilder {
public:
  explicit KernelBuilder(KernelSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

  const KernelSpec &spec() const { return spec_; }

  double lambda_at(double x_star, double H) const {
    if (spec_.mode == BoundaryMode::periodic)
      return 0.0;
    return shift_lambda(x_star, spec_, H);
  }

  Kernel make(double x_star) const {
    const double a = spec_.domain_lo;
    const double b = spec_.domain_hi;
    const double tol = 1e-12 * std::max(1.0, spec_.length());
    if (spec_.mode == BoundaryMode::position_dependent && (x_star < a - tol || x_star > b + tol))
      throw DomainError("filtering point " + std::to_string(x_star) + " outside the domain");

    Kernel k;
    k.x_star = x_star;
    k.H = scaling_at(std::clamp(x_star, a, b), spec_);
    const double lambda = lambda_at(x_star, k.H);
    k.knots = build_knot_matrix(spec_, lambda);
    k.coeffs = coefficients_for(k.knots);

    if (spec_.mode == BoundaryMode::position_dependent) {
      if (k.support_lo() < a - tol || k.support_hi() > b + tol) {
        std::ostringstream msg;
        msg << "kernel support [" << k.support_lo() << ", " << k.support_hi()
            << "] leaves the domain at x* = " << x_star;
        throw InvalidInput(msg.str());
      }
    }
    return k;
  }

private:
  bool cacheable(double lambda) const {
    return lambda == 0.0 || std::abs(lambda) == spec_.half_width();
  }

  std::vector<double> coefficients_for(const KnotMatrix &T) const {
    if (!cacheable(T.shift))
      return solve_coefficients(T, spec_.order);
    {
      std::shared_lock lock(mutex_);
      if (auto it = cache_.find(T.shift); it != cache_.end())
        return it->second;
    }
    auto c = solve_coefficients(T, spec_.order);
    std::unique_lock lock(mutex_);
    cache_.emplace(T.shift, c);
    return c;
  }

  KernelSpec spec_;
  mutable std::shared_mutex mutex_;
  mutable std::map<double, std::vector<double>> cache_;
};

inline Kernel make_kernel_at(double x_star, const KernelSpec &spec) {
  return KernelBuilder(spec).make(x_star);
}

} // namespace siac
