#pragma once

// Conversion of cell-centred point samples into a piecewise polynomial on a
// superimposed mesh.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "siac/error.hpp"

namespace siac {

/// Samples f_j at cell centres x_j of a bounded interval [domain_lo, domain_hi].
struct PointwiseData {
  double domain_lo = 0.0;
  double domain_hi = 1.0;
  std::vector<double> xs;
  std::vector<double> fs;

  std::size_t size() const { return xs.size(); }

  void validate() const {
    if (xs.empty())
      throw InvalidInput("pointwise data is empty");
    if (xs.size() != fs.size())
      throw InvalidInput("pointwise data: " + std::to_string(xs.size()) +
                         " positions but " + std::to_string(fs.size()) + " values");
    if (!(domain_lo < domain_hi))
      throw InvalidInput("pointwise data: domain_lo must be below domain_hi");
    if (!(domain_lo < xs.front()) || !(xs.back() < domain_hi))
      throw InvalidInput("pointwise data: sample positions must lie strictly inside the domain");
    for (std::size_t j = 1; j < xs.size(); ++j)
      if (!(xs[j - 1] < xs[j]))
        throw InvalidInput("pointwise data: positions not strictly increasing at index " +
                           std::to_string(j));
  }
};

/// Contiguous run of cells [first_cell, last_cell] forming one element.
struct ElementCells {
  std::size_t first_cell = 0;
  std::size_t last_cell = 0;
};

struct Mesh {
  std::vector<double> cell_edges; // N + 1 entries, first = a, last = b
  std::vector<ElementCells> elements;

  std::size_t num_cells() const { return cell_edges.size() - 1; }
  double element_lo(std::size_t k) const { return cell_edges[elements[k].first_cell]; }
  double element_hi(std::size_t k) const { return cell_edges[elements[k].last_cell + 1]; }
};

/// Cells have edges at midpoints between samples and at the domain ends;
/// elements group one or two cells (a trailing odd cell stands alone).
inline Mesh build_mesh(const PointwiseData &data, int cells_per_element = 1) {
  data.validate();
  if (cells_per_element != 1 && cells_per_element != 2)
    throw InvalidInput("cells_per_element must be 1 or 2");

  const std::size_t n = data.size();
  Mesh mesh;
  mesh.cell_edges.resize(n + 1);
  mesh.cell_edges.front() = data.domain_lo;
  mesh.cell_edges.back() = data.domain_hi;
  for (std::size_t j = 1; j < n; ++j)
    mesh.cell_edges[j] = 0.5 * (data.xs[j - 1] + data.xs[j]);

  const auto step = static_cast<std::size_t>(cells_per_element);
  for (std::size_t c = 0; c < n; c += step)
    mesh.elements.push_back({c, std::min(c + step - 1, n - 1)});
  return mesh;
}

/// Piecewise polynomial u_h. Each element stores monomial coefficients in the
/// local variable s = (x - centre) / half_width.
class PiecewiseInterpolant {
public:
  struct Piece {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> coeffs; // ascending powers of s

    double centre() const { return 0.5 * (lo + hi); }
    double half_width() const { return 0.5 * (hi - lo); }

    double evaluate(double x) const {
      const double s = (x - centre()) / half_width();
      double v = 0.0;
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        v = v * s + *it;
      return v;
    }
  };

  PiecewiseInterpolant() = default;

  PiecewiseInterpolant(std::vector<Piece> pieces, bool periodic)
      : pieces_(std::move(pieces)), periodic_(periodic) {
    if (pieces_.empty())
      throw InvalidInput("interpolant needs at least one element");
    breakpoints_.reserve(pieces_.size() + 1);
    breakpoints_.push_back(pieces_.front().lo);
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
      const Piece &p = pieces_[k];
      if (!(p.lo < p.hi))
        throw InvalidInput("interpolant element " + std::to_string(k) + " has non-positive width");
      if (k > 0 && p.lo != pieces_[k - 1].hi)
        throw InvalidInput("interpolant elements must be contiguous");
      if (p.coeffs.empty())
        throw InvalidInput("interpolant element " + std::to_string(k) + " has no coefficients");
      breakpoints_.push_back(p.hi);
      degree_ = std::max(degree_, p.coeffs.size() - 1);
    }
  }

  /// Interpolant equal to the same global polynomial (ascending monomial
  /// coefficients in x) on every element of the given breakpoints.
  static PiecewiseInterpolant from_polynomial(std::span<const double> breakpoints,
                                              std::span<const double> monomial,
                                              bool periodic = false) {
    if (breakpoints.size() < 2)
      throw InvalidInput("from_polynomial needs at least two breakpoints");
    std::vector<Piece> pieces;
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
      Piece p{breakpoints[k], breakpoints[k + 1], {}};
      // Re-expand sum_i m_i x^i with x = c + w s.
      const double c = p.centre();
      const double w = p.half_width();
      std::vector<double> out(monomial.size(), 0.0);
      std::vector<double> power{1.0}; // coefficients of (c + w s)^i
      for (std::size_t i = 0; i < monomial.size(); ++i) {
        for (std::size_t j = 0; j < power.size(); ++j)
          out[j] += monomial[i] * power[j];
        std::vector<double> next(power.size() + 1, 0.0);
        for (std::size_t j = 0; j < power.size(); ++j) {
          next[j] += c * power[j];
          next[j + 1] += w * power[j];
        }
        power = std::move(next);
      }
      if (out.empty())
        out.push_back(0.0);
      p.coeffs = std::move(out);
      pieces.push_back(std::move(p));
    }
    return PiecewiseInterpolant(std::move(pieces), periodic);
  }

  double domain_lo() const { return breakpoints_.front(); }
  double domain_hi() const { return breakpoints_.back(); }
  double length() const { return domain_hi() - domain_lo(); }
  bool periodic() const { return periodic_; }
  std::size_t max_degree() const { return degree_; }
  std::size_t num_elements() const { return pieces_.size(); }
  const std::vector<double> &breakpoints() const { return breakpoints_; }
  const Piece &piece(std::size_t k) const { return pieces_[k]; }

  /// Map x into [a, b) for periodic data; otherwise reject points outside
  /// [a, b] beyond round-off.
  double wrap(double x) const {
    const double a = domain_lo();
    const double b = domain_hi();
    if (periodic_) {
      if (x >= a && x < b)
        return x;
      double t = std::fmod(x - a, b - a);
      if (t < 0.0)
        t += b - a;
      const double y = a + t;
      return y >= b ? a : y;
    }
    const double tol = 1e-12 * (b - a);
    if (x < a - tol || x > b + tol)
      throw DomainError("evaluation point " + std::to_string(x) + " outside [" +
                        std::to_string(a) + ", " + std::to_string(b) + "]");
    return std::clamp(x, a, b);
  }

  /// Element owning x (already inside the domain): half-open [lo, hi), last closed.
  std::size_t locate(double x) const {
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    const auto idx = static_cast<std::size_t>(std::distance(breakpoints_.begin(), it));
    if (idx == 0)
      return 0;
    return std::min(idx - 1, pieces_.size() - 1);
  }

  double evaluate(double x) const {
    const double y = wrap(x);
    return pieces_[locate(y)].evaluate(y);
  }

private:
  std::vector<Piece> pieces_;
  std::vector<double> breakpoints_;
  std::size_t degree_ = 0;
  bool periodic_ = false;
};

namespace detail {

// Coefficients (ascending in s) of the Lagrange basis polynomial for node q.
inline std::vector<double> lagrange_basis_coeffs(std::span<const double> nodes, std::size_t q) {
  std::vector<double> poly{1.0};
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (n == q)
      continue;
    const double denom = nodes[q] - nodes[n];
    std::vector<double> next(poly.size() + 1, 0.0);
    for (std::size_t j = 0; j < poly.size(); ++j) {
      next[j] -= nodes[n] * poly[j] / denom;
      next[j + 1] += poly[j] / denom;
    }
    poly = std::move(next);
  }
  return poly;
}

} // namespace detail

/// Element-wise Lagrange interpolant through the stencil
/// {I_{j-left}, ..., I_{j+right}} anchored at the first cell j of each element.
/// Near the domain ends the stencil loses the cells that do not exist and the
/// local degree drops with it.
inline PiecewiseInterpolant lagrange_interpolant(const PointwiseData &data, const Mesh &mesh,
                                                 int left_width, int right_width,
                                                 bool periodic = false) {
  data.validate();
  if (left_width < 0 || right_width < 0)
    throw InvalidInput("stencil widths must be non-negative");
  const std::size_t n = data.size();
  if (static_cast<std::size_t>(left_width) + static_cast<std::size_t>(right_width) + 1 > n)
    throw InvalidInput("stencil of " + std::to_string(left_width + right_width + 1) +
                       " cells is wider than the grid of " + std::to_string(n) + " cells");
  if (mesh.num_cells() != n)
    throw InvalidInput("mesh does not match the data");

  std::vector<PiecewiseInterpolant::Piece> pieces;
  pieces.reserve(mesh.elements.size());
  for (std::size_t k = 0; k < mesh.elements.size(); ++k) {
    PiecewiseInterpolant::Piece piece{mesh.element_lo(k), mesh.element_hi(k), {}};
    const auto j = static_cast<std::ptrdiff_t>(mesh.elements[k].first_cell);
    const std::ptrdiff_t first = std::max<std::ptrdiff_t>(0, j - left_width);
    const std::ptrdiff_t last =
        std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1, j + right_width);

    const double c = piece.centre();
    const double w = piece.half_width();
    std::vector<double> nodes;
    std::vector<double> values;
    for (std::ptrdiff_t q = first; q <= last; ++q) {
      nodes.push_back((data.xs[static_cast<std::size_t>(q)] - c) / w);
      values.push_back(data.fs[static_cast<std::size_t>(q)]);
    }
    piece.coeffs.assign(nodes.size(), 0.0);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const auto basis = detail::lagrange_basis_coeffs(nodes, q);
      for (std::size_t i = 0; i < basis.size(); ++i)
        piece.coeffs[i] += values[q] * basis[i];
    }
    pieces.push_back(std::move(piece));
  }
  return PiecewiseInterpolant(std::move(pieces), periodic);
}

/// Cell-wise constant initialisation u_h = f_j on I_j.
inline PiecewiseInterpolant piecewise_constant(const PointwiseData &data, bool periodic = false) {
  return lagrange_interpolant(data, build_mesh(data, 1), 0, 0, periodic);
}

inline double evaluate_interpolant(const PiecewiseInterpolant &interp, double x) {
  return interp.evaluate(x);
}

} // namespace siac
