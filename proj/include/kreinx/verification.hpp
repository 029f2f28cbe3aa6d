#pragma once

// Executable checks of the resolvent and Gamma identities, on the matrix
// backend (exact linear algebra) and on convolution backends (quadrature).
// Residuals are relative: the max-entry norm of the difference over the
// max-entry norm of the largest term.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kreinx/errors.hpp"
#include "kreinx/krein_core.hpp"
#include "kreinx/laplacian.hpp"
#include "kreinx/linalg.hpp"
#include "kreinx/matrix_oracle.hpp"
#include "kreinx/multiplier.hpp"
#include "kreinx/random.hpp"

namespace kreinx {

struct CheckResult {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::size_t count = 0;   // number of evaluated instances
  std::string note;        // set when a check was skipped
};

class VerificationReport {
 public:
  std::uint64_t seed = 0;
  std::string summary;

  /// Folds one residual into the named check.
  void record(const std::string& name, double residual, double tolerance) {
    CheckResult& c = slot(name, tolerance);
    c.max_residual = std::max(c.max_residual, residual);
    // NaN residuals fail.
    if (!(residual <= tolerance)) c.pass = false;
    ++c.count;
  }

  void skip(const std::string& name, double tolerance, const std::string& why) {
    CheckResult& c = slot(name, tolerance);
    if (c.note.empty()) c.note = why;
  }

  void merge(const VerificationReport& other) {
    for (const auto& [name, c] : other.checks_) {
      CheckResult& mine = slot(name, c.tolerance);
      mine.max_residual = std::max(mine.max_residual, c.max_residual);
      mine.pass = mine.pass && c.pass;
      mine.count += c.count;
      if (mine.note.empty()) mine.note = c.note;
    }
  }

  /// Checks ordered by name.
  std::vector<CheckResult> checks() const {
    std::vector<CheckResult> out;
    for (const auto& entry : checks_) out.push_back(entry.second);
    return out;
  }

  const CheckResult* find(const std::string& name) const {
    auto it = checks_.find(name);
    return it == checks_.end() ? nullptr : &it->second;
  }

  bool pass() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const auto& e) { return e.second.pass; });
  }

 private:
  CheckResult& slot(const std::string& name, double tolerance) {
    auto [it, fresh] = checks_.try_emplace(name);
    if (fresh) {
      it->second.name = name;
      it->second.tolerance = tolerance;
    }
    return it->second;
  }

  std::map<std::string, CheckResult> checks_;
};

namespace detail {

inline double relative(const CMatrix& diff, std::initializer_list<double> scales) {
  double s = 0.0;
  for (double v : scales) s = std::max(s, v);
  const double d = max_abs(diff);
  if (d == 0.0) return 0.0;
  return s > 0.0 ? d / s : d;
}

/// Perturbed resolvent matrix, column by column through the Krein formula.
inline CMatrix krein_resolvent_matrix(const ExtensionProblem& problem, Complex z) {
  const Index n = problem.evaluator().field_dim();
  CMatrix out(n, n);
  for (Index k = 0; k < n; ++k) out.col(k) = krein_apply(problem, z, CVector::Unit(n, k));
  return out;
}

inline CMatrix oracle_resolvent(const CMatrix& b, Complex z) {
  CMatrix shifted = -b;
  shifted.diagonal().array() += z;
  return shifted.partialPivLu().inverse();
}

/// Orthonormal basis of ker(tau), as columns.
inline CMatrix kernel_basis(const CMatrix& tau) {
  Eigen::JacobiSVD<CMatrix> svd(tau, Eigen::ComputeFullV);
  const Index rank = tau.rows();
  return svd.matrixV().rightCols(tau.cols() - rank);
}

}  // namespace detail

/// Resolvent identities for G and K over all ordered pairs of z_list:
///   (z - w) R(w) G(z) = G(w) - G(z)
///   K(w) - K(z) = G(z) - G(w)
///   -A K(z) = z G(z)
inline VerificationReport check_base_identities(const MatrixModel& model, const std::vector<Complex>& zs,
                                                double tol, const std::string& prefix = "matrix/") {
  VerificationReport report;
  std::vector<GMaps> maps;
  std::vector<CMatrix> rs;
  for (Complex z : zs) {
    maps.push_back(g_maps(model, z));
    rs.push_back(base_resolvent(model, z));
  }
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const Complex z = zs[i];
    const CMatrix lhs = -model.a() * maps[i].k;
    const CMatrix rhs = z * maps[i].g;
    report.record(prefix + "a_k_relation", detail::relative(lhs - rhs, {max_abs(lhs), max_abs(rhs)}), tol);
    for (std::size_t j = 0; j < zs.size(); ++j) {
      const Complex w = zs[j];
      const CMatrix& gz = maps[i].g;
      const CMatrix& gw = maps[j].g;
      const CMatrix first = (z - w) * (rs[j] * gz);
      report.record(prefix + "first_resolvent_g",
                    detail::relative(first - (gw - gz), {max_abs(first), max_abs(gw), max_abs(gz)}), tol);
      const CMatrix kdiff = maps[j].k - maps[i].k;
      report.record(prefix + "k_difference",
                    detail::relative(kdiff - (gz - gw), {max_abs(maps[j].k), max_abs(maps[i].k), max_abs(gz),
                                                         max_abs(gw)}),
                    tol);
    }
  }
  return report;
}

/// Gamma identities over all ordered pairs:
///   Gamma(z) - Gamma(w) = (z - w) Gbreve(w) G(z)
///   Gamma(conj z) = Gamma(z)^*
/// The difference identity is skipped when the backend cannot form
/// Gbreve(w) G(z).
inline VerificationReport check_gamma_identities(const GammaEvaluator& ev, const std::vector<Complex>& zs,
                                                 double tol, const std::string& prefix) {
  VerificationReport report;
  std::vector<CMatrix> gammas;
  for (Complex z : zs) gammas.push_back(ev.gamma(z));
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const CMatrix conj_side = ev.gamma(std::conj(zs[i]));
    const CMatrix adj = gammas[i].adjoint();
    report.record(prefix + "gamma_conjugate_symmetry",
                  detail::relative(conj_side - adj, {max_abs(conj_side), max_abs(adj)}), tol);
  }
  for (std::size_t i = 0; i < zs.size(); ++i) {
    for (std::size_t j = 0; j < zs.size(); ++j) {
      const Complex z = zs[i], w = zs[j];
      CMatrix product;
      try {
        product = (z - w) * ev.gbreve_g(w, z);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::UnsupportedAction) throw;
        report.skip(prefix + "gamma_difference", tol, "skipped: no Gbreve G product for " + ev.name());
        return report;
      }
      const CMatrix lhs = gammas[i] - gammas[j];
      report.record(prefix + "gamma_difference",
                    detail::relative(lhs - product, {max_abs(gammas[i]), max_abs(gammas[j]), max_abs(product)}),
                    tol);
    }
  }
  return report;
}

/// Perturbed resolvent against the additive oracle, plus structural checks:
///   krein_vs_oracle              R_Theta(z) = (z - B)^{-1}
///   kernel_coincidence           B phi0 = A phi0 for phi0 in ker(tau)
///   perturbed_resolvent_identity R_Theta(z) - R_Theta(w) = (w - z) R_Theta(z) R_Theta(w)
///   adjoint_symmetry             R_Theta(conj z) = R_Theta(z)^*
/// With an empty phi0 list an orthonormal basis of ker(tau) is used.
inline VerificationReport check_extension(const MatrixModel& model, const ThetaMatrix& theta,
                                          const std::vector<Complex>& zs, std::vector<CVector> phi0_samples,
                                          double tol, const std::string& prefix = "matrix/") {
  VerificationReport report;
  auto ev = std::make_shared<MatrixEvaluator>(model);
  const ExtensionProblem problem(ev, theta);

  std::vector<CMatrix> krein;
  for (Complex z : zs) krein.push_back(detail::krein_resolvent_matrix(problem, z));

  bool have_oracle = true;
  CMatrix b;
  try {
    b = woodbury_extension(model, theta);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::OracleDegenerate) throw;
    have_oracle = false;
    report.skip(prefix + "krein_vs_oracle", tol, "skipped: oracle degenerate");
    report.skip(prefix + "kernel_coincidence", tol, "skipped: oracle degenerate");
  }

  if (have_oracle) {
    for (std::size_t i = 0; i < zs.size(); ++i) {
      const CMatrix direct = detail::oracle_resolvent(b, zs[i]);
      report.record(prefix + "krein_vs_oracle",
                    detail::relative(krein[i] - direct, {max_abs(krein[i]), max_abs(direct)}), tol);
    }
    if (phi0_samples.empty()) {
      const CMatrix basis = detail::kernel_basis(model.tau());
      for (Index k = 0; k < basis.cols(); ++k) phi0_samples.push_back(basis.col(k));
    }
    for (const CVector& phi : phi0_samples) {
      const CVector bphi = b * phi;
      const CVector aphi = model.a() * phi;
      report.record(prefix + "kernel_coincidence",
                    detail::relative(bphi - aphi, {max_abs(bphi), max_abs(aphi)}), tol);
    }
  }

  for (std::size_t i = 0; i < zs.size(); ++i) {
    const CMatrix conj_side = detail::krein_resolvent_matrix(problem, std::conj(zs[i]));
    const CMatrix adj = krein[i].adjoint();
    report.record(prefix + "adjoint_symmetry", detail::relative(conj_side - adj, {max_abs(conj_side), max_abs(adj)}),
                  tol);
    for (std::size_t j = 0; j < zs.size(); ++j) {
      const Complex z = zs[i], w = zs[j];
      const CMatrix lhs = krein[i] - krein[j];
      const CMatrix rhs = (w - z) * (krein[i] * krein[j]);
      report.record(prefix + "perturbed_resolvent_identity",
                    detail::relative(lhs - rhs, {max_abs(krein[i]), max_abs(krein[j]), max_abs(rhs)}), tol);
    }
  }
  return report;
}

/// Spectral parameters for random checks: x + iy with |x| <= 12 and
/// 0.1 <= |y| <= 5, away from the real spectrum of every model.
inline std::vector<Complex> random_spectral_points(Rng& rng, int count) {
  std::vector<Complex> zs;
  for (int i = 0; i < count; ++i) {
    const double x = rng.uniform(-12.0, 12.0);
    double y = rng.uniform(0.1, 5.0);
    if (rng.uniform() < 0.5) y = -y;
    zs.emplace_back(x, y);
  }
  return zs;
}

struct SuiteOptions {
  std::uint64_t seed = 42;
  int models = 100;
  int points_per_model = 5;
  double tol_matrix = 1e-11;
  double tol_quad = 1e-6;
};

/// Convolution backends at fixed geometries. Tolerances are the quadrature
/// tolerance for checks that go through quadrature, tol_matrix otherwise.
inline VerificationReport convolution_checks(const SuiteOptions& opt) {
  VerificationReport report;
  // 1D: two points on the nodes of a grid with step 1e-3 (trapezoid error
  // of order h^2 z).
  {
    const Grid1D grid = Grid1D::covering(-30.0, 30.0, 1e-3);
    const LaplacianEvaluator ev(PointSet::on_line({-0.5, 0.75}), grid);
    report.merge(check_gamma_identities(ev, {{1.0, 0.0}, {4.0, 0.0}, {2.0, 1.0}}, opt.tol_quad, "laplacian1d/"));
  }
  {
    const LaplacianEvaluator ev(PointSet(2, {{0.0, 0.0, 0.0}, {1.0, 0.5, 0.0}}));
    report.merge(check_gamma_identities(ev, {{1.0, 0.0}, {4.0, 0.0}, {2.0, 1.0}, {0.5, -2.0}}, opt.tol_matrix,
                                        "laplacian2d/"));
  }
  {
    const LaplacianEvaluator ev(PointSet(3, {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.3, 0.4}}));
    report.merge(check_gamma_identities(ev, {{1.0, 0.0}, {4.0, 0.0}, {2.0, 1.0}, {0.5, -2.0}}, opt.tol_quad,
                                        "laplacian3d/"));
  }
  {
    const MultiplierEvaluator ev(Multiplier1D({0.0, 0.0, -1.0}, {0.25}), PointSet::on_line({0.0, 0.8}), 4.0);
    report.merge(check_gamma_identities(ev, {{6.0, 0.0}, {2.0, 1.0}}, opt.tol_quad, "multiplier1d/"));
  }
  return report;
}

/// Seeded random matrix models plus the convolution checks.
inline VerificationReport run_suite(const SuiteOptions& opt) {
  VerificationReport report;
  report.seed = opt.seed;
  Rng rng(opt.seed);
  for (int m = 0; m < opt.models; ++m) {
    const RandomSystem sys = random_system(rng);
    const std::vector<Complex> zs = random_spectral_points(rng, opt.points_per_model);
    report.merge(check_base_identities(sys.model, zs, opt.tol_matrix));
    report.merge(check_gamma_identities(MatrixEvaluator(sys.model), zs, opt.tol_matrix, "matrix/"));
    report.merge(check_extension(sys.model, sys.theta, zs, {}, opt.tol_matrix));
  }
  report.merge(convolution_checks(opt));
  report.summary = std::to_string(opt.models) + " random matrix models (n <= 12, N <= 4), " +
                   std::to_string(opt.points_per_model) + " z each; laplacian 1d/2d/3d and multiplier1d geometries";
  return report;
}

}  // namespace kreinx
