#pragma once

// Exact evaluation of u*(x) = integral K_H(x - y) u_h(y) dy by Gauss quadrature
// between every break of the data and of the kernel.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

#include "siac/error.hpp"
#include "siac/grid_init.hpp"
#include "siac/kernel.hpp"
#include "siac/quadrature.hpp"

namespace siac {

class Filter {
public:
  Filter(const PiecewiseInterpolant &interp, const KernelSpec &spec)
      : interp_(interp), builder_(spec) {
    const double tol = 1e-12 * std::max(1.0, interp.length());
    if (std::abs(spec.domain_lo - interp.domain_lo()) > tol ||
        std::abs(spec.domain_hi - interp.domain_hi()) > tol)
      throw InvalidInput("kernel domain does not match the interpolant domain");
    if (spec.mode == BoundaryMode::periodic && !interp.periodic())
      throw InvalidInput("periodic filtering needs a periodic interpolant");
    const auto p = static_cast<int>(interp.max_degree());
    nodes_ = static_cast<std::size_t>((p + spec.order + 1) / 2 + 1);
  }

  const KernelSpec &spec() const { return builder_.spec(); }

  /// Filtered value at one point.
  double operator()(double x_star) const {
    const Kernel k = builder_.make(x_star);
    const bool periodic = spec().mode == BoundaryMode::periodic;
    const double a = interp_.domain_lo();
    const double b = interp_.domain_hi();
    const double L = b - a;

    double lo = k.support_lo();
    double hi = k.support_hi();
    if (!periodic) {
      lo = std::max(lo, a);
      hi = std::min(hi, b);
    }

    std::vector<double> breaks{lo, hi};
    for (double t : k.unscaled_breaks()) {
      const double y = x_star - k.H * t;
      if (y > lo && y < hi)
        breaks.push_back(y);
    }
    const auto &bp = interp_.breakpoints();
    if (periodic) {
      const auto first = static_cast<long>(std::floor((lo - a) / L)) - 1;
      const auto last = static_cast<long>(std::ceil((hi - a) / L)) + 1;
      for (long s = first; s <= last; ++s)
        for (double y0 : bp) {
          const double y = y0 + static_cast<double>(s) * L;
          if (y > lo && y < hi)
            breaks.push_back(y);
        }
    } else {
      auto it = std::upper_bound(bp.begin(), bp.end(), lo);
      for (; it != bp.end() && *it < hi; ++it)
        breaks.push_back(*it);
    }
    std::sort(breaks.begin(), breaks.end());
    const double merge_tol = 1e-14 * L;
    std::vector<double> panels;
    panels.reserve(breaks.size());
    for (double y : breaks)
      if (panels.empty() || y - panels.back() > merge_tol)
        panels.push_back(y);
    if (panels.back() < hi)
      panels.back() = hi;

    const GaussRule &rule = gauss_legendre(nodes_);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < panels.size(); ++i) {
      const double y0 = panels[i];
      const double y1 = panels[i + 1];
      const double mid = 0.5 * (y0 + y1);
      const double half = 0.5 * (y1 - y0);
      double offset = 0.0;
      double probe = mid;
      if (periodic) {
        probe = interp_.wrap(mid);
        offset = mid - probe;
      }
      const auto &piece = interp_.piece(interp_.locate(probe));
      double panel = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double y = mid + half * rule.nodes[q];
        panel += rule.weights[q] * k.eval_unscaled((x_star - y) / k.H) * piece.evaluate(y - offset);
      }
      sum += panel * half;
    }
    return sum / k.H;
  }

  /// Filter every point of xs. Results do not depend on the thread count.
  std::vector<double> operator()(std::span<const double> xs, unsigned threads = 0) const {
    std::vector<double> out(xs.size());
    if (threads == 0)
      threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, xs.size() / 16)));
    if (threads <= 1) {
      for (std::size_t i = 0; i < xs.size(); ++i)
        out[i] = (*this)(xs[i]);
      return out;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
          try {
            for (std::size_t i = t; i < xs.size(); i += threads)
              out[i] = (*this)(xs[i]);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
    }
    for (auto &e : errors)
      if (e)
        std::rethrow_exception(e);
    return out;
  }

private:
  const PiecewiseInterpolant &interp_;
  KernelBuilder builder_;
  std::size_t nodes_ = 2;
};

inline double filter_point(const PiecewiseInterpolant &interp, const KernelSpec &spec,
                           double x_star) {
  return Filter(interp, spec)(x_star);
}

inline std::vector<double> filter_grid(const PiecewiseInterpolant &interp, const KernelSpec &spec,
                                       std::span<const double> xs_out, unsigned threads = 0) {
  return Filter(interp, spec)(xs_out, threads);
}

} // namespace siac
