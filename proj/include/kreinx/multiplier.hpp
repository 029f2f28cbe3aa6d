#pragma once

// Convolution operators on L^2(R) given by a real symbol
//
//   m(xi) = sum_k a_k xi^k + sum_k c_k cos(k xi),
//
// with even degree >= 2 and negative leading coefficient (Delta has
// m = -xi^2). The resolvent kernel is
//
//   G_z(x) = (1/2pi) int exp(i xi x) / (z - m(xi)) dxi.
//
// There is no closed-form fundamental solution for a generic symbol, so
// Gamma is only exposed relative to an anchor w0:
//
//   Gamma(z) - Gamma(w0) = [ (G_{w0} - G_z)(y_j - y_k) ]_{jk}
//
// which is absolutely convergent. Using an anchor shifts the extension
// parameter: Theta' = Theta + Gamma(w0). This reintroduces the dependence on
// an arbitrary spectral point that the z = 0 normalization of the Laplacian
// backend avoids.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "kreinx/errors.hpp"
#include "kreinx/krein_core.hpp"
#include "kreinx/laplacian.hpp"
#include "kreinx/linalg.hpp"
#include "kreinx/quadrature.hpp"

namespace kreinx {

class Multiplier1D {
 public:
  /// poly[k] multiplies xi^k; cosines[k-1] multiplies cos(k xi).
  Multiplier1D(std::vector<double> poly, std::vector<double> cosines = {})
      : poly_(std::move(poly)), cosines_(std::move(cosines)) {
    for (double c : poly_)
      if (!std::isfinite(c)) throw Error(ErrorKind::InvalidSymbol, "non-finite polynomial coefficient");
    for (double c : cosines_)
      if (!std::isfinite(c)) throw Error(ErrorKind::InvalidSymbol, "non-finite cosine coefficient");
    while (!poly_.empty() && poly_.back() == 0.0) poly_.pop_back();
    const int degree = static_cast<int>(poly_.size()) - 1;
    if (degree < 2 || degree % 2 != 0)
      throw Error(ErrorKind::InvalidSymbol, "polynomial part must have even degree >= 2");
    if (!(poly_.back() < 0.0))
      throw Error(ErrorKind::InvalidSymbol, "leading coefficient must be negative");
    analyze();
  }

  static Multiplier1D laplacian() { return Multiplier1D({0.0, 0.0, -1.0}); }

  const std::vector<double>& poly() const noexcept { return poly_; }
  const std::vector<double>& cosines() const noexcept { return cosines_; }
  int degree() const noexcept { return static_cast<int>(poly_.size()) - 1; }
  double leading() const noexcept { return poly_.back(); }
  /// Largest cosine frequency.
  int max_frequency() const noexcept { return static_cast<int>(cosines_.size()); }

  double operator()(double xi) const {
    double value = 0.0;
    for (auto it = poly_.rbegin(); it != poly_.rend(); ++it) value = value * xi + *it;
    for (std::size_t k = 0; k < cosines_.size(); ++k)
      value += cosines_[k] * std::cos(static_cast<double>(k + 1) * xi);
    return value;
  }

  /// m < 0 for |xi| > radius().
  double radius() const noexcept { return radius_; }
  /// Rigorous upper bound of m over R (grid maximum plus a Lipschitz margin).
  double sup_bound() const noexcept { return sup_bound_; }
  /// Sign changes of m seen on the analysis grid (finite by analyticity).
  int sign_changes() const noexcept { return sign_changes_; }

  /// |leading| L^d / 2 >= (lower-order part bound at L) + extra; once true
  /// for some L >= 1 it stays true beyond.
  bool dominates_beyond(double L, double extra) const {
    double lower = extra;
    for (double c : cosines_) lower += std::abs(c);
    for (int k = 0; k < degree(); ++k) lower += std::abs(poly_[k]) * std::pow(L, k);
    return std::abs(leading()) * std::pow(L, degree()) / 2.0 >= lower;
  }

  bool in_resolvent_set(Complex z) const { return z.imag() != 0.0 || z.real() > sup_bound_; }

 private:
  void analyze() {
    double lower = 0.0;
    for (int k = 0; k < degree(); ++k) lower += std::abs(poly_[k]);
    for (double c : cosines_) lower += std::abs(c);
    radius_ = std::max(1.0, lower / std::abs(leading())) * (1.0 + 1e-12);

    double lipschitz = 0.0;
    for (int k = 1; k <= degree(); ++k) lipschitz += k * std::abs(poly_[k]) * std::pow(radius_, k - 1);
    for (std::size_t k = 0; k < cosines_.size(); ++k) lipschitz += (k + 1) * std::abs(cosines_[k]);

    constexpr int kGrid = 1 << 16;
    const double h = 2.0 * radius_ / kGrid;
    double best = -std::numeric_limits<double>::infinity();
    bool any_nonzero = false;
    double prev = 0.0;
    for (int i = 0; i <= kGrid; ++i) {
      const double v = (*this)(-radius_ + i * h);
      best = std::max(best, v);
      if (v != 0.0) any_nonzero = true;
      if (i > 0 && ((prev < 0.0 && v > 0.0) || (prev > 0.0 && v < 0.0))) ++sign_changes_;
      if (v != 0.0) prev = v;
    }
    if (!any_nonzero) throw Error(ErrorKind::InvalidSymbol, "symbol vanishes on the analysis grid");
    sup_bound_ = best + 0.5 * h * lipschitz;
  }

  std::vector<double> poly_;
  std::vector<double> cosines_;
  double radius_ = 1.0;
  double sup_bound_ = 0.0;
  int sign_changes_ = 0;
};

struct FourierOptions {
  /// Target error relative to the kernel scale at x = 0.
  double rel_tol = 1e-11;
  double max_cutoff = 1 << 20;
};

namespace detail {

/// (1/2pi) int_R exp(i xi x) h(xi) dxi, folded onto [0, inf). The range
/// grows by doubling until tail_bound(L) is below the target.
template <typename H, typename TailBound>
Complex fourier_inverse(const H& h, double x, int max_frequency, const TailBound& tail_bound,
                        double scale_hint, const FourierOptions& opt) {
  auto folded = [&](double xi) {
    const Complex e(std::cos(xi * x), std::sin(xi * x));
    return e * h(xi) + std::conj(e) * h(-xi);
  };
  auto even = [&](double xi) { return h(xi) + h(-xi); };
  const double panel = std::min(1.0, std::numbers::pi / (std::abs(x) + max_frequency + 1e-300));

  double cutoff = 32.0;
  // Kernel scale: the x = 0 value over the initial window.
  const double window = std::abs(quad::adaptive_gk(even, 0.0, cutoff, 1e-14)) / (2.0 * std::numbers::pi);
  const double abs_tol = opt.rel_tol * std::max({window, scale_hint, 1e-300});
  // Per-panel tolerance on the unnormalized integral.
  const double panel_tol = abs_tol * 2.0 * std::numbers::pi * panel / 64.0;

  auto integrate = [&](double a, double b) {
    Complex sum = 0.0;
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / panel)));
    const double w = (b - a) / n;
    for (int p = 0; p < n; ++p) sum += quad::adaptive_gk(folded, a + p * w, a + (p + 1) * w, panel_tol);
    return sum;
  };

  Complex total = integrate(0.0, cutoff);
  while (tail_bound(cutoff) / (2.0 * std::numbers::pi) > abs_tol) {
    if (cutoff >= opt.max_cutoff)
      throw Error(ErrorKind::TailEstimateFailed, "tail bound does not reach the target below the cutoff limit");
    total += integrate(cutoff, 2.0 * cutoff);
    cutoff *= 2.0;
  }
  return total / (2.0 * std::numbers::pi);
}

inline void require_symbol_resolvent(const Multiplier1D& m, Complex z) {
  if (!m.in_resolvent_set(z))
    throw Error(ErrorKind::SymbolRangeHit,
                "z = " + format_complex(z) + " meets the closure of the range of the symbol");
}

}  // namespace detail

/// Resolvent kernel G_z(x) of the convolution operator with symbol m.
inline Complex multiplier_gz_1d(const Multiplier1D& m, Complex z, double x, const FourierOptions& opt = {}) {
  detail::require_symbol_resolvent(m, z);
  const int d = m.degree();
  const double q = -m.leading();
  const double inf = std::numeric_limits<double>::infinity();

  if (d == 2) {
    // Subtract 1/(q (1 + xi^2)), whose transform is exp(-|x|)/(2q); the
    // remainder decays like xi^{-3} (xi^{-4} for even symbols).
    const double b = m.poly()[1];
    double a0 = std::abs(q - z + m.poly()[0]);
    for (double c : m.cosines()) a0 += std::abs(c);
    auto remainder = [&](double xi) {
      return 1.0 / (z - m(xi)) - 1.0 / (q * (1.0 + xi * xi));
    };
    auto tail = [&](double L) {
      if (!m.dominates_beyond(L, std::abs(z))) return inf;
      return 2.0 * (2.0 * a0 / (3.0 * q * q * L * L * L) + std::abs(b) / (q * q * L * L));
    };
    return detail::fourier_inverse(remainder, x, m.max_frequency(), tail, 1.0 / (2.0 * q), opt) +
           std::exp(-std::abs(x)) / (2.0 * q);
  }

  auto resolvent = [&](double xi) { return 1.0 / (z - m(xi)); };
  auto tail = [&](double L) {
    if (!m.dominates_beyond(L, std::abs(z))) return inf;
    return 2.0 * 2.0 / (q * (d - 1) * std::pow(L, d - 1));
  };
  return detail::fourier_inverse(resolvent, x, m.max_frequency(), tail, 0.0, opt);
}

/// (G_{w0} - G_z)(x): the kernel of Gamma(z) - Gamma(w0).
inline Complex anchored_kernel_1d(const Multiplier1D& m, Complex z, Complex w0, double x,
                                  const FourierOptions& opt = {}) {
  detail::require_symbol_resolvent(m, z);
  detail::require_symbol_resolvent(m, w0);
  if (z == w0) return 0.0;
  const int d = m.degree();
  const double a = std::abs(m.leading());
  const double extra = std::max(std::abs(z), std::abs(w0));
  const double inf = std::numeric_limits<double>::infinity();
  auto integrand = [&](double xi) {
    const double v = m(xi);
    return (z - w0) / ((w0 - v) * (z - v));
  };
  auto tail = [&](double L) {
    if (!m.dominates_beyond(L, extra)) return inf;
    return 2.0 * 4.0 * std::abs(z - w0) / (a * a * (2 * d - 1) * std::pow(L, 2 * d - 1));
  };
  return detail::fourier_inverse(integrand, x, m.max_frequency(), tail, 0.0, opt);
}

/// Gamma(z) - Gamma(w0) for point traces on the line.
inline CMatrix anchored_gamma_1d(const Multiplier1D& m, const PointSet& ps, Complex z, Complex w0,
                                 const FourierOptions& opt = {}) {
  if (ps.dim() != 1) throw Error(ErrorKind::InvalidPointSet, "multiplier backend needs dim = 1");
  const Index n = ps.size();
  CMatrix out(n, n);
  const Complex diag = anchored_kernel_1d(m, z, w0, 0.0, opt);
  for (Index j = 0; j < n; ++j) {
    out(j, j) = diag;
    for (Index k = 0; k < n; ++k)
      if (k != j) out(j, k) = anchored_kernel_1d(m, z, w0, ps[j][0] - ps[k][0], opt);
  }
  return out;
}

/// GammaEvaluator for a generic symbol, anchored at w0 (see the header note).
class MultiplierEvaluator final : public GammaEvaluator {
 public:
  MultiplierEvaluator(Multiplier1D symbol, PointSet points, Complex anchor, FourierOptions opt = {})
      : symbol_(std::move(symbol)), points_(std::move(points)), anchor_(anchor), opt_(opt) {
    if (points_.dim() != 1) throw Error(ErrorKind::InvalidPointSet, "multiplier backend needs dim = 1");
    detail::require_symbol_resolvent(symbol_, anchor_);
  }

  const Multiplier1D& symbol() const noexcept { return symbol_; }
  const PointSet& points() const noexcept { return points_; }
  Complex anchor() const noexcept { return anchor_; }

  std::string name() const override { return "multiplier1d backend"; }
  Index charge_dim() const override { return points_.size(); }
  bool in_resolvent_set(Complex z) const override { return symbol_.in_resolvent_set(z); }
  bool real_interval_in_resolvent_set(double a, double b) const override {
    return a <= b && a > symbol_.sup_bound();
  }
  CMatrix gamma(Complex z) const override { return anchored_gamma_1d(symbol_, points_, z, anchor_, opt_); }
  bool conjugates_charges() const override { return true; }

 private:
  Multiplier1D symbol_;
  PointSet points_;
  Complex anchor_;
  FourierOptions opt_;
};

}  // namespace kreinx
