#pragma once

// Real poles of the perturbed resolvent: points lambda of the real resolvent
// set where the hermitian pencil Theta + Gamma(lambda) is singular.
//
// Roots are found by tracking the sorted eigenvalue branches of the pencil
// on a grid, bracketing sign changes and bisecting. Determinant signs are
// not used: they under/overflow and cannot see an even number of vanishing
// eigenvalues. A branch that dips towards zero between grid nodes without a
// sign change is probed with a golden-section search, which either exposes a
// pair of close roots or is reported as a tangency warning.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kreinx/errors.hpp"
#include "kreinx/green.hpp"
#include "kreinx/krein_core.hpp"
#include "kreinx/laplacian.hpp"
#include "kreinx/linalg.hpp"
#include "kreinx/matrix_oracle.hpp"
#include "kreinx/quadrature.hpp"

namespace kreinx {

struct SpectralRoot {
  double z0 = 0.0;
  CVector charge;        // unit norm, phase fixed
  double residual = 0.0; // smallest |eigenvalue| of Theta + Gamma(z0)
  int multiplicity = 1;
  Admissibility admissibility = Admissibility::none;

  /// Schrodinger-facing energy of -A^tau_Theta.
  double energy() const noexcept { return -z0; }
};

struct ScanDiagnostics {
  double a = 0.0;
  double b = 0.0;
  int grid = 0;
  std::vector<std::string> warnings;
};

struct SpectrumReport {
  std::vector<SpectralRoot> roots;  // ascending in z0
  ScanDiagnostics diagnostics;
};

struct ScanOptions {
  int grid = 512;
  int max_bisections = 60;
};

namespace detail {

inline RVector pencil_branches(const ExtensionProblem& problem, double lambda) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gamma_theta(problem, Complex(lambda, 0.0)),
                                             Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

inline std::string format_lambda(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

/// Bisection on a branch with f(lo), f(hi) of opposite signs.
template <typename F>
double bisect(const F& f, double lo, double hi, double f_lo, int max_iter) {
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
    }
  }
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

/// Golden-section minimum of f on [lo, hi]; returns (argmin, min).
template <typename F>
std::pair<double, double> golden_min(const F& f, double lo, double hi, int iterations = 60) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - ratio * (hi - lo);
  double d = lo + ratio * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - ratio * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + ratio * (hi - lo);
      fd = f(d);
    }
  }
  return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

inline void fix_phase(CVector& q) {
  const double norm = q.norm();
  if (norm == 0.0) return;
  q /= norm;
  for (Index i = 0; i < q.size(); ++i) {
    const double mag = std::abs(q(i));
    if (mag > 1e-12) {
      q *= std::conj(q(i)) / mag;
      q(i) = Complex(std::abs(q(i)), 0.0);
      return;
    }
  }
}

inline std::pair<CVector, double> least_modulus_eigenvector(const ExtensionProblem& problem, double z0) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gamma_theta(problem, Complex(z0, 0.0)));
  Index best = 0;
  for (Index i = 1; i < eig.eigenvalues().size(); ++i)
    if (std::abs(eig.eigenvalues()(i)) < std::abs(eig.eigenvalues()(best))) best = i;
  return {eig.eigenvectors().col(best), std::abs(eig.eigenvalues()(best))};
}

inline CVector charge_from_kernel(const GammaEvaluator& ev, CVector v) {
  // Theta + Gamma acts on the coefficient vector; convert back to a charge.
  CVector q = charge_coefficients(ev, v);
  fix_phase(q);
  return q;
}

}  // namespace detail

/// Unit charge vector Q spanning the kernel of Theta + Gamma(z0), first
/// nonzero component real-positive.
inline CVector charge_vector(const ExtensionProblem& problem, double z0) {
  auto [v, modulus] = detail::least_modulus_eigenvector(problem, z0);
  if (modulus > problem.tolerances().root)
    throw Error(ErrorKind::NotAPole, "Theta + Gamma(" + detail::format_lambda(z0) +
                                         ") has no eigenvalue below tol_root (smallest " +
                                         std::to_string(modulus) + ")");
  return detail::charge_from_kernel(problem.evaluator(), std::move(v));
}

inline SpectrumReport scan_spectrum(const ExtensionProblem& problem, double a, double b,
                                    const ScanOptions& opt = {}) {
  if (!(a < b) || opt.grid < 1 || !problem.evaluator().real_interval_in_resolvent_set(a, b))
    throw Error(ErrorKind::IntervalOutsideResolventSet,
                "[" + detail::format_lambda(a) + ", " + detail::format_lambda(b) +
                    "] is not a proper interval of the real resolvent set of " + problem.evaluator().name());

  SpectrumReport report;
  report.diagnostics = {a, b, opt.grid, {}};
  auto& warnings = report.diagnostics.warnings;

  const int m = opt.grid;
  const Index n = problem.charge_dim();
  std::vector<double> lambdas(m + 1);
  std::vector<RVector> values(m + 1);
  for (int k = 0; k <= m; ++k) {
    lambdas[k] = k == m ? b : a + (b - a) * k / m;
    values[k] = detail::pencil_branches(problem, lambdas[k]);
  }

  std::vector<double> raw;
  for (Index i = 0; i < n; ++i) {
    auto branch = [&](double lambda) { return detail::pencil_branches(problem, lambda)(i); };
    for (int k = 0; k < m; ++k) {
      const double f0 = values[k](i), f1 = values[k + 1](i);
      if (f0 == 0.0) {
        raw.push_back(lambdas[k]);
      } else if (f1 == 0.0) {
        if (k + 1 == m) raw.push_back(lambdas[k + 1]);
      } else if ((f0 < 0.0) != (f1 < 0.0)) {
        raw.push_back(detail::bisect(branch, lambdas[k], lambdas[k + 1], f0, opt.max_bisections));
      }
    }
    // Dips towards zero between nodes without a sign change.
    for (int k = 1; k < m; ++k) {
      const double fl = values[k - 1](i), fc = values[k](i), fr = values[k + 1](i);
      if (fl == 0.0 || fc == 0.0 || fr == 0.0) continue;
      if ((fl < 0.0) != (fc < 0.0) || (fc < 0.0) != (fr < 0.0)) continue;
      if (!(std::abs(fc) < std::abs(fl) && std::abs(fc) <= std::abs(fr))) continue;
      const double sign = fc < 0.0 ? -1.0 : 1.0;
      auto signed_branch = [&](double lambda) { return sign * branch(lambda); };
      const auto [arg, low] = detail::golden_min(signed_branch, lambdas[k - 1], lambdas[k + 1]);
      if (low < 0.0) {
        auto shifted = [&](double lambda) { return branch(lambda); };
        raw.push_back(detail::bisect(shifted, lambdas[k - 1], arg, fl, opt.max_bisections));
        raw.push_back(detail::bisect(shifted, arg, lambdas[k + 1], branch(arg), opt.max_bisections));
      } else if (low <= problem.tolerances().root) {
        warnings.push_back("tangency of pencil branch " + std::to_string(i) + " near lambda = " +
                           detail::format_lambda(arg) + " (even multiplicity, not reported as a root)");
      }
    }
  }
  std::sort(raw.begin(), raw.end());

  // Roots from different branches at the same point form one root with
  // multiplicity.
  std::vector<std::vector<double>> groups;
  for (double r : raw) {
    if (!groups.empty() && std::abs(r - groups.back().back()) <= 1e-9 * std::max(1.0, std::abs(r)))
      groups.back().push_back(r);
    else
      groups.push_back({r});
  }

  for (const auto& g : groups) {
    double z0 = 0.0;
    for (double r : g) z0 += r;
    z0 /= static_cast<double>(g.size());
    SpectralRoot root;
    root.z0 = z0;
    root.multiplicity = static_cast<int>(g.size());
    auto [v, modulus] = detail::least_modulus_eigenvector(problem, z0);
    root.residual = modulus;
    root.charge = detail::charge_from_kernel(problem.evaluator(), std::move(v));
    root.admissibility = admissible_real(problem, z0);
    if (modulus > problem.tolerances().root)
      warnings.push_back("root near lambda = " + detail::format_lambda(z0) +
                         " converged only to pencil residual " + std::to_string(modulus));
    const RVector branches = detail::pencil_branches(problem, z0);
    int near_zero = 0;
    const double band = 1e3 * problem.tolerances().root;
    for (Index i = 0; i < branches.size(); ++i)
      if (std::abs(branches(i)) <= band) ++near_zero;
    if (near_zero > root.multiplicity)
      warnings.push_back("BranchCrossingAmbiguity near lambda = " + detail::format_lambda(z0) +
                         ": more pencil eigenvalues vanish than were bracketed; refine the grid");
    report.roots.push_back(std::move(root));
  }
  return report;
}

/// Values of the eigenfunction x -> sum_j conj(Q_j) G_{z0}(|x - y_j|).
inline std::vector<Complex> eigenfunction_eval(const PointSet& ps, const CVector& charge, Complex z0,
                                               const std::vector<Point>& xs) {
  if (charge.size() != ps.size()) throw Error(ErrorKind::DimensionMismatch, "charge has wrong size");
  require_off_branch_cut(z0);
  const LaplacianKernel kernel(ps.dim());
  std::vector<Complex> out;
  out.reserve(xs.size());
  for (const Point& x : xs) {
    Complex value = 0.0;
    for (Index j = 0; j < ps.size(); ++j) {
      const double r = distance(x, ps[j]);
      if (ps.dim() > 1 && r == 0.0)
        throw Error(ErrorKind::EvaluationAtSingularity, "eigenfunction evaluated at an interaction point");
      if (charge(j) == Complex(0.0)) continue;
      value += std::conj(charge(j)) * kernel.gz(r, z0);
    }
    out.push_back(value);
  }
  return out;
}

/// L^2 norm of the eigenfunction: piecewise Gauss-Legendre in dimension 1,
/// bipolar/radial quadrature in dimension 3.
inline double eigenfunction_l2_norm(const PointSet& ps, const CVector& charge, Complex z0) {
  if (charge.size() != ps.size()) throw Error(ErrorKind::DimensionMismatch, "charge has wrong size");
  require_off_branch_cut(z0);
  if (ps.dim() == 1) {
    std::vector<double> breaks;
    for (const Point& p : ps.points()) breaks.push_back(p[0]);
    std::sort(breaks.begin(), breaks.end());
    const double decay = std::sqrt(z0).real();
    const double reach = 40.0 / decay;
    static const quad::Rule rule = quad::gauss_legendre(20);
    auto density = [&](double x) {
      const Complex v = eigenfunction_eval(ps, charge, z0, {{x, 0.0, 0.0}})[0];
      return Complex(std::norm(v), 0.0);
    };
    auto pieces = [&](double lo, double hi) {
      const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) * decay * 2.0)));
      return quad::composite(density, lo, hi, panels, rule).real();
    };
    double total = pieces(breaks.front() - reach, breaks.front()) + pieces(breaks.back(), breaks.back() + reach);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) total += pieces(breaks[i], breaks[i + 1]);
    return std::sqrt(total);
  }
  if (ps.dim() == 3) {
    Complex total = 0.0;
    for (Index j = 0; j < ps.size(); ++j)
      for (Index k = 0; k < ps.size(); ++k)
        total += charge(j) * std::conj(charge(k)) * overlap_3d(std::conj(z0), z0, distance(ps[j], ps[k]));
    return std::sqrt(std::max(0.0, total.real()));
  }
  throw Error(ErrorKind::UnsupportedAction, "L2 norm is available in dimensions 1 and 3");
}

struct ResidualCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::string note;
};

struct EigenpairReport {
  std::vector<ResidualCheck> checks;
  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const ResidualCheck& c) { return c.pass; });
  }
};

struct EigenpairOptions {
  /// Finite-difference step for the 1D checks (scaled by 1/sqrt(z0) when z0 > 1).
  double h = 1e-3;
  double fd_tolerance = 1e-6;
  double oracle_tolerance = 1e-10;
};

namespace detail {

inline void add_check(EigenpairReport& report, std::string name, double value, double tol, std::string note = {}) {
  report.checks.push_back({std::move(name), value, tol, value <= tol, std::move(note)});
}

inline void fd_checks_1d(EigenpairReport& report, const PointSet& ps, double z0, const CVector& charge,
                         const EigenpairOptions& opt) {
  const double scale_q = max_abs(charge);
  if (scale_q == 0.0) {
    add_check(report, "fd_equation", 0.0, opt.fd_tolerance);
    add_check(report, "derivative_jump", 0.0, opt.fd_tolerance);
    return;
  }
  const double decay = std::sqrt(z0);
  double h = opt.h / std::max(1.0, decay);
  double min_sep = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < ps.size(); ++j)
    for (Index k = j + 1; k < ps.size(); ++k) min_sep = std::min(min_sep, std::abs(ps[j][0] - ps[k][0]));
  h = std::min(h, min_sep / 8.0);

  auto phi = [&](double x) { return eigenfunction_eval(ps, charge, z0, {{x, 0.0, 0.0}})[0]; };

  double phi_scale = 0.0;
  for (Index j = 0; j < ps.size(); ++j) phi_scale = std::max(phi_scale, std::abs(phi(ps[j][0])));

  std::vector<double> samples;
  for (Index j = 0; j < ps.size(); ++j) {
    const double y = ps[j][0];
    for (double off : {-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0}) samples.push_back(y + off / decay);
    for (Index k = 0; k < ps.size(); ++k)
      if (k != j) samples.push_back(0.5 * (y + ps[k][0]));
  }
  double fd = 0.0;
  for (double x : samples) {
    bool clear = true;
    for (Index j = 0; j < ps.size(); ++j)
      if (std::abs(x - ps[j][0]) < 3.0 * h) clear = false;
    if (!clear) continue;
    const Complex second = (phi(x + h) - 2.0 * phi(x) + phi(x - h)) / (h * h);
    fd = std::max(fd, std::abs(second - z0 * phi(x)) / (std::max(1.0, z0) * phi_scale));
  }
  add_check(report, "fd_equation", fd, opt.fd_tolerance, "relative to max(1, z0) * max|phi|");

  double jump = 0.0;
  for (Index j = 0; j < ps.size(); ++j) {
    const double y = ps[j][0];
    const Complex right = (-3.0 * phi(y) + 4.0 * phi(y + h) - phi(y + 2.0 * h)) / (2.0 * h);
    const Complex left = (3.0 * phi(y) - 4.0 * phi(y - h) + phi(y - 2.0 * h)) / (2.0 * h);
    jump = std::max(jump, std::abs((right - left) + std::conj(charge(j))) / scale_q);
  }
  add_check(report, "derivative_jump", jump, opt.fd_tolerance, "jump of phi' at y_j against -conj(Q_j)");
}

inline void oracle_check(EigenpairReport& report, const MatrixEvaluator& ev, const ThetaMatrix& theta, double z0,
                         const CVector& charge, const EigenpairOptions& opt) {
  const MatrixModel& model = ev.model();
  CMatrix b;
  try {
    b = woodbury_extension(model, theta);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::OracleDegenerate) throw;
    add_check(report, "oracle_eigenvector", 0.0, opt.oracle_tolerance, "skipped: oracle degenerate");
    return;
  }
  const CVector phi = ev.g_apply(z0, charge);
  const double norm = phi.norm();
  double residual = 0.0;
  if (norm > 0.0) residual = (b * phi - z0 * phi).norm() / (norm * std::max(1.0, std::abs(z0)));
  add_check(report, "oracle_eigenvector", residual, opt.oracle_tolerance,
            "|B phi - z0 phi| / (|phi| max(1,|z0|)), phi = G(z0) Q");
}

}  // namespace detail

/// Residuals of a computed bound state. Always checks the pencil; adds the
/// distributional checks in dimension 1 and the oracle check on matrices.
inline EigenpairReport verify_eigenpair(const ExtensionProblem& problem, double z0, const CVector& charge,
                                        const EigenpairOptions& opt = {}) {
  if (charge.size() != problem.charge_dim()) throw Error(ErrorKind::DimensionMismatch, "charge has wrong size");
  EigenpairReport report;
  const GammaEvaluator& ev = problem.evaluator();
  const CVector coeff = charge_coefficients(ev, charge);
  const double pencil = (gamma_theta(problem, Complex(z0, 0.0)) * coeff).norm();
  detail::add_check(report, "pencil", pencil, 10.0 * problem.tolerances().root, "|(Theta + Gamma(z0)) Q|");

  if (const auto* lap = dynamic_cast<const LaplacianEvaluator*>(&ev); lap && lap->points().dim() == 1)
    detail::fd_checks_1d(report, lap->points(), z0, charge, opt);
  if (const auto* mat = dynamic_cast<const MatrixEvaluator*>(&ev))
    detail::oracle_check(report, *mat, problem.theta(), z0, coeff, opt);
  return report;
}

/// Every real pole of a matrix-backend problem: each gap of the spectrum of
/// A is scanned separately, up to a bound on the spectrum of the extension
/// (|A| + |tau|^2 / smin(anchor pencil)).
inline std::vector<SpectralRoot> matrix_poles(const ExtensionProblem& problem, const MatrixModel& model,
                                              const ScanOptions& opt = {}) {
  const CMatrix pencil = anchor_pencil(model, problem.theta());
  const double smin = min_singular_value(pencil);
  const double tau_norm = spectral_norm(model.tau());
  const double top = model.spectrum().cwiseAbs().maxCoeff();
  const double bound = smin > 0.0 ? 1.0 + top + tau_norm * tau_norm / smin : 1e8 * (1.0 + top);
  std::vector<double> edges{-bound};
  for (Index i = 0; i < model.spectrum().size(); ++i) edges.push_back(model.spectrum()(i));
  edges.push_back(bound);
  std::vector<SpectralRoot> roots;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double margin_lo = i == 0 ? 0.0 : 1e-9 * std::max(1.0, std::abs(edges[i]));
    const double margin_hi = i + 2 == edges.size() ? 0.0 : 1e-9 * std::max(1.0, std::abs(edges[i + 1]));
    const double a = edges[i] + margin_lo, b = edges[i + 1] - margin_hi;
    if (!(a < b)) continue;
    for (auto& r : scan_spectrum(problem, a, b, opt).roots) roots.push_back(std::move(r));
  }
  return roots;
}

}  // namespace kreinx
