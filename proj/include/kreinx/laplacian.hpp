#pragma once

// Point interactions for A = Delta on R^n, n = 1, 2, 3. The trace evaluates at
// finitely many points y_1..y_N; the z = 0 anchor uses the fundamental
// solution G of -Delta, so
//
//   Gamma(z)_{jk} = (G - G_z)(|y_j - y_k|)       j != k
//   Gamma(z)_{jj} = lim_{r->0} (G - G_z)(r)
//
// Charges follow the conjugating convention: the field carried by a charge
// Q is x -> sum_j conj(Q_j) G_z(|x - y_j|).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "kreinx/errors.hpp"
#include "kreinx/green.hpp"
#include "kreinx/krein_core.hpp"
#include "kreinx/linalg.hpp"
#include "kreinx/quadrature.hpp"

namespace kreinx {

using Point = std::array<double, 3>;

inline double distance(const Point& a, const Point& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Distinct interaction points in R^dim. Unused coordinates are zero.
class PointSet {
 public:
  PointSet(int dim, std::vector<Point> points) : dim_(dim), points_(std::move(points)) {
    if (dim_ < 1 || dim_ > 3) throw Error(ErrorKind::InvalidPointSet, "dimension must be 1, 2 or 3");
    if (points_.empty()) throw Error(ErrorKind::InvalidPointSet, "at least one point is required");
    for (auto& p : points_) {
      for (int c = 0; c < 3; ++c) {
        if (!std::isfinite(p[c])) throw Error(ErrorKind::InvalidPointSet, "non-finite coordinate");
        if (c >= dim_ && p[c] != 0.0)
          throw Error(ErrorKind::InvalidPointSet, "coordinate beyond the dimension must be zero");
      }
    }
    for (std::size_t j = 0; j < points_.size(); ++j)
      for (std::size_t k = j + 1; k < points_.size(); ++k)
        if (!(distance(points_[j], points_[k]) > 0.0))
          throw Error(ErrorKind::InvalidPointSet,
                      "points " + std::to_string(j) + " and " + std::to_string(k) + " coincide");
  }

  static PointSet on_line(std::vector<double> xs) {
    std::vector<Point> pts;
    pts.reserve(xs.size());
    for (double x : xs) pts.push_back({x, 0.0, 0.0});
    return PointSet(1, std::move(pts));
  }

  int dim() const noexcept { return dim_; }
  Index size() const noexcept { return static_cast<Index>(points_.size()); }
  const std::vector<Point>& points() const noexcept { return points_; }
  const Point& operator[](Index i) const { return points_[static_cast<std::size_t>(i)]; }

 private:
  int dim_;
  std::vector<Point> points_;
};

/// Uniform grid x_i = x0 + i h, i = 0..n-1, with trapezoid weights.
struct Grid1D {
  double x0 = 0.0;
  double h = 1.0;
  Index n = 0;

  double x(Index i) const { return x0 + static_cast<double>(i) * h; }
  double weight(Index i) const { return (i == 0 || i == n - 1) ? 0.5 * h : h; }
  double x_end() const { return x(n - 1); }

  /// Grid of step h covering [lo, hi] with lo on a node.
  static Grid1D covering(double lo, double hi, double h) {
    const auto n = static_cast<Index>(std::ceil((hi - lo) / h - 1e-9)) + 1;
    return {lo, h, n};
  }
};

inline CMatrix gamma_matrix(const PointSet& ps, Complex z) {
  const LaplacianKernel kernel(ps.dim());
  const Complex diag = kernel.renormalized_diagonal(z);
  const Index n = ps.size();
  CMatrix out(n, n);
  for (Index j = 0; j < n; ++j) {
    out(j, j) = diag;
    for (Index k = j + 1; k < n; ++k) {
      const Complex v = kernel.difference(distance(ps[j], ps[k]), z);
      out(j, k) = v;
      out(k, j) = v;
    }
  }
  return out;
}

/// Entries (G_z * f)(y_j) by the trapezoid rule on a uniform grid; O(h^2).
/// The step must resolve the decay length: h <= 1 / (4 Re sqrt(z)).
inline CVector gbreve_apply_1d(const PointSet& ps, Complex z, const Grid1D& grid, const CVector& f) {
  if (ps.dim() != 1) throw Error(ErrorKind::InvalidPointSet, "gbreve_apply_1d needs dim = 1");
  require_off_branch_cut(z);
  if (f.size() != grid.n) throw Error(ErrorKind::DimensionMismatch, "samples do not match the grid");
  const Complex s = std::sqrt(z);
  if (grid.h > 1.0 / (4.0 * s.real()))
    throw Error(ErrorKind::GridTooCoarse, "grid step exceeds 1/(4 Re sqrt(z))");
  CVector out = CVector::Zero(ps.size());
  for (Index j = 0; j < ps.size(); ++j) {
    const double y = ps[j][0];
    Complex acc = 0.0;
    for (Index i = 0; i < grid.n; ++i) {
      if (f(i) == Complex(0.0)) continue;
      acc += grid.weight(i) * std::exp(-s * std::abs(y - grid.x(i))) * f(i);
    }
    out(j) = acc / (2.0 * s);
  }
  return out;
}

/// int_{R^3} G_w(|x - a|) G_z(|x - b|) dx with d = |a - b|, by quadrature in
/// the bipolar coordinates r1 = |x - a|, r2 = |x - b| (radial quadrature
/// when d = 0). Used as the quadrature side of Gamma(z) - Gamma(w) checks.
inline Complex overlap_3d(Complex w, Complex z, double d) {
  require_off_branch_cut(w);
  require_off_branch_cut(z);
  const Complex s = std::sqrt(w), t = std::sqrt(z);
  static const quad::Rule rule = quad::gauss_legendre(20);
  const Complex c = 0.5 * (s + t);
  // e^{-c rho} on [0, rho_max]; panels resolve both decay and oscillation.
  const double rho_max = 46.0 / c.real();
  const double panel = std::min(1.0 / c.real(), std::numbers::pi / std::max(std::abs(c.imag()), 1e-300));
  const int panels = std::max(1, static_cast<int>(std::ceil(rho_max / panel)));
  if (d == 0.0) {
    auto radial = [&](double r) { return std::exp(-2.0 * c * r); };
    return quad::composite(radial, 0.0, rho_max / 2.0, panels, rule) / (4.0 * std::numbers::pi);
  }
  auto along = [&](double rho) { return std::exp(-c * rho); };
  const Complex u_part = std::exp(-c * d) * quad::composite(along, 0.0, rho_max, panels, rule);
  const Complex e = 0.5 * (s - t);
  const double v_panel = 1.0 / std::max(std::abs(e), 1.0 / d);
  const int v_panels = std::max(1, static_cast<int>(std::ceil(2.0 * d / v_panel)));
  auto across = [&](double v) { return std::exp(-e * v); };
  const Complex v_part = quad::composite(across, -d, d, v_panels, rule);
  return u_part * v_part / (16.0 * std::numbers::pi * d);
}

/// GammaEvaluator for the Laplacian with point traces. Field actions are
/// available in dimension 1 when a grid is supplied.
class LaplacianEvaluator final : public GammaEvaluator {
 public:
  explicit LaplacianEvaluator(PointSet points, std::optional<Grid1D> grid = std::nullopt)
      : points_(std::move(points)), grid_(grid) {
    if (grid_ && points_.dim() != 1)
      throw Error(ErrorKind::InvalidModel, "grid field actions exist only in dimension 1");
    if (grid_ && (grid_->n < 2 || !(grid_->h > 0.0)))
      throw Error(ErrorKind::InvalidModel, "grid needs n >= 2 and h > 0");
  }

  const PointSet& points() const noexcept { return points_; }
  const std::optional<Grid1D>& grid() const noexcept { return grid_; }

  std::string name() const override { return "laplacian" + std::to_string(points_.dim()) + "d backend"; }
  Index charge_dim() const override { return points_.size(); }
  bool in_resolvent_set(Complex z) const override { return !on_branch_cut(z); }
  bool real_interval_in_resolvent_set(double a, double b) const override { return a > 0.0 && a <= b; }
  CMatrix gamma(Complex z) const override { return gamma_matrix(points_, z); }
  bool conjugates_charges() const override { return true; }

  bool supports_field_actions() const override { return grid_.has_value(); }
  Index field_dim() const override { return grid_ ? grid_->n : 0; }

  CVector resolvent_apply(Complex z, const CVector& f) const override {
    const Grid1D& g = require_grid("resolvent_apply");
    require_off_branch_cut(z);
    if (f.size() != g.n) throw Error(ErrorKind::DimensionMismatch, "samples do not match the grid");
    const Complex s = std::sqrt(z);
    if (g.h > 1.0 / (4.0 * s.real()))
      throw Error(ErrorKind::GridTooCoarse, "grid step exceeds 1/(4 Re sqrt(z))");
    CVector out(g.n);
    for (Index i = 0; i < g.n; ++i) {
      Complex acc = 0.0;
      for (Index k = 0; k < g.n; ++k)
        acc += g.weight(k) * std::exp(-s * std::abs(g.x(i) - g.x(k))) * f(k);
      out(i) = acc / (2.0 * s);
    }
    return out;
  }

  CVector gbreve_apply(Complex z, const CVector& f) const override {
    return gbreve_apply_1d(points_, z, require_grid("gbreve_apply"), f);
  }

  CVector g_apply(Complex z, const CVector& q) const override {
    const Grid1D& g = require_grid("g_apply");
    if (q.size() != charge_dim()) throw Error(ErrorKind::DimensionMismatch, "charge has wrong size");
    const LaplacianKernel kernel(1);
    CVector out = CVector::Zero(g.n);
    for (Index i = 0; i < g.n; ++i)
      for (Index j = 0; j < q.size(); ++j) out(i) += q(j) * kernel.gz(std::abs(g.x(i) - points_[j][0]), z);
    return out;
  }

  CMatrix gbreve_g(Complex w, Complex z) const override {
    if (points_.dim() == 3) {
      const Index n = charge_dim();
      CMatrix out(n, n);
      for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < n; ++k) out(j, k) = overlap_3d(w, z, distance(points_[j], points_[k]));
      return out;
    }
    if (points_.dim() == 1 && grid_) return GammaEvaluator::gbreve_g(w, z);
    unsupported("gbreve_g");
  }

 private:
  const Grid1D& require_grid(const char* what) const {
    if (!grid_) unsupported(what);
    return *grid_;
  }

  PointSet points_;
  std::optional<Grid1D> grid_;
};

}  // namespace kreinx
