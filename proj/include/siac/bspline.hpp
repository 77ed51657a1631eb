#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "siac/error.hpp"
#include "siac/quadrature.hpp"

namespace siac {

/// Knots t_0 <= ... <= t_order of a single B-spline of the given order
/// (piecewise polynomial of degree order - 1).
class KnotSequence {
public:
  KnotSequence() = default;
  explicit KnotSequence(std::vector<double> knots) : knots_(std::move(knots)) { validate(); }
  KnotSequence(std::initializer_list<double> knots) : knots_(knots) { validate(); }

  int order() const { return static_cast<int>(knots_.size()) - 1; }
  std::span<const double> knots() const { return knots_; }
  double operator[](std::size_t i) const { return knots_[i]; }
  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }

  bool operator==(const KnotSequence &) const = default;

private:
  void validate() const {
    if (knots_.size() < 2)
      throw InvalidInput("a knot sequence needs at least two knots");
    for (std::size_t i = 1; i < knots_.size(); ++i)
      if (knots_[i] < knots_[i - 1])
        throw InvalidInput("knot sequence must be nondecreasing");
    if (knots_.front() == knots_.back())
      throw InvalidInput("knot sequence has zero-length support");
  }

  std::vector<double> knots_;
};

/// Cox–de Boor recursion. Terms whose weight denominator vanishes (repeated
/// knots) are dropped. Support is [t_0, t_order).
inline double bspline_eval(const KnotSequence &ks, double x) {
  const auto t = ks.knots();
  const int order = ks.order();
  if (x < t.front() || x >= t.back())
    return 0.0;

  // Order-1 characteristic functions, then raise the order in place.
  double basis[32];
  std::vector<double> heap;
  double *b = basis;
  if (order > 32) {
    heap.resize(static_cast<std::size_t>(order));
    b = heap.data();
  }
  for (int j = 0; j < order; ++j)
    b[j] = (t[j] <= x && x < t[j + 1]) ? 1.0 : 0.0;

  for (int k = 2; k <= order; ++k) {
    for (int j = 0; j + k <= order; ++j) {
      double v = 0.0;
      const double dl = t[j + k - 1] - t[j];
      if (dl > 0.0 && b[j] != 0.0)
        v += (x - t[j]) / dl * b[j];
      const double dr = t[j + k] - t[j + 1];
      if (dr > 0.0 && b[j + 1] != 0.0)
        v += (t[j + k] - x) / dr * b[j + 1];
      b[j] = v;
    }
  }
  return b[0];
}

/// Number of Gauss points per knot interval integrating B(y) * y^p exactly.
inline std::size_t bspline_moment_nodes(int order, int p) {
  return static_cast<std::size_t>((order - 1 + p + 1 + 1) / 2);
}

/// b_p = integral of B(y) (-y)^p dy, exact up to round-off.
inline double bspline_moment(const KnotSequence &ks, int p) {
  if (p < 0)
    throw InvalidInput("moment index must be non-negative");
  const auto t = ks.knots();
  const std::size_t n = std::max<std::size_t>(1, bspline_moment_nodes(ks.order(), p));
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (!(t[i] < t[i + 1]))
      continue;
    sum += integrate_gauss([&](double y) { return bspline_eval(ks, y) * std::pow(-y, p); },
                           t[i], t[i + 1], n);
  }
  return sum;
}

} // namespace siac
