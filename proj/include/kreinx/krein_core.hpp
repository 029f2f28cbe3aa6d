#pragma once

// Backend-independent Krein machinery: the pencil Theta + Gamma(z), the
// perturbed resolvent R(z) + G(z) (Theta + Gamma(z))^{-1} Gbreve(z), and the
// real-axis admissibility sets W+ / W-.
//
// The parameter space is C^N with its Hilbert structure, so every
// conjugate-linear map of the abstract construction is stored as an ordinary
// complex matrix.

#include <memory>
#include <string>
#include <utility>

#include "kreinx/errors.hpp"
#include "kreinx/linalg.hpp"

namespace kreinx {

/// Relative tolerance for treating a computed matrix as hermitian.
inline constexpr double kHermitianTolerance = 1e-10;

/// Hermitian extension parameter. Input must equal its conjugate transpose
/// exactly.
class ThetaMatrix {
 public:
  explicit ThetaMatrix(CMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
      throw Error(ErrorKind::InvalidModel, "theta must be a non-empty square matrix");
    if (!is_exactly_hermitian(entries_))
      throw Error(ErrorKind::NotHermitian, "theta must equal its conjugate transpose");
  }

  static ThetaMatrix scalar(double value) { return ThetaMatrix(CMatrix::Constant(1, 1, value)); }

  static ThetaMatrix multiple_of_identity(Index n, double value) {
    return ThetaMatrix(CMatrix::Identity(n, n) * value);
  }

  const CMatrix& entries() const noexcept { return entries_; }
  Index dim() const noexcept { return entries_.rows(); }

  ThetaMatrix shifted(double c) const {
    return ThetaMatrix(CMatrix(entries_ + c * CMatrix::Identity(dim(), dim())));
  }

 private:
  CMatrix entries_;
};

/// Contract every backend implements.
///
/// Field vectors are backend-specific sample vectors (a vector of C^n for
/// the matrix backend, grid samples for the 1D Laplacian). `g_apply` takes
/// the linear coefficient vector q of the charge: for backends whose charges
/// follow the conjugating convention (`conjugates_charges()`), the charge Q
/// and q are related by q = conj(Q).
class GammaEvaluator {
 public:
  virtual ~GammaEvaluator() = default;

  virtual std::string name() const = 0;
  virtual Index charge_dim() const = 0;
  virtual bool in_resolvent_set(Complex z) const = 0;
  /// True if the closed real interval [a, b] lies in the resolvent set.
  virtual bool real_interval_in_resolvent_set(double a, double b) const = 0;
  virtual CMatrix gamma(Complex z) const = 0;

  virtual bool conjugates_charges() const { return false; }
  virtual bool supports_field_actions() const { return false; }
  virtual Index field_dim() const { return 0; }

  virtual CVector resolvent_apply(Complex, const CVector&) const { unsupported("resolvent_apply"); }
  virtual CVector gbreve_apply(Complex, const CVector&) const { unsupported("gbreve_apply"); }
  virtual CVector g_apply(Complex, const CVector&) const { unsupported("g_apply"); }

  /// Matrix of Gbreve(w) G(z); column k is Gbreve(w) applied to G(z) e_k.
  virtual CMatrix gbreve_g(Complex w, Complex z) const {
    const Index n = charge_dim();
    CMatrix out(n, n);
    for (Index k = 0; k < n; ++k)
      out.col(k) = gbreve_apply(w, g_apply(z, CVector::Unit(n, k)));
    return out;
  }

  void require_resolvent(Complex z) const {
    if (!in_resolvent_set(z))
      throw Error(ErrorKind::OutsideResolventSet,
                  "z = " + format_complex(z) + " is not in the resolvent set of " + name());
  }

 protected:
  [[noreturn]] void unsupported(const char* what) const {
    throw Error(ErrorKind::UnsupportedAction, std::string(what) + " is not available for " + name());
  }
};

struct Tolerances {
  double linear = 1e-12;
  double root = 1e-10;
};

/// A backend together with an extension parameter; consumed by every solver.
class ExtensionProblem {
 public:
  ExtensionProblem(std::shared_ptr<const GammaEvaluator> evaluator, ThetaMatrix theta,
                   Tolerances tol = {})
      : evaluator_(std::move(evaluator)), theta_(std::move(theta)), tol_(tol) {
    if (!evaluator_) throw Error(ErrorKind::InvalidModel, "null evaluator");
    if (theta_.dim() != evaluator_->charge_dim())
      throw Error(ErrorKind::DimensionMismatch,
                  "theta is " + std::to_string(theta_.dim()) + "x" + std::to_string(theta_.dim()) +
                      " but the trace has " + std::to_string(evaluator_->charge_dim()) + " rows");
    if (!(tol_.linear > 0.0) || !(tol_.root > 0.0))
      throw Error(ErrorKind::InvalidModel, "tolerances must be positive");
  }

  const GammaEvaluator& evaluator() const noexcept { return *evaluator_; }
  std::shared_ptr<const GammaEvaluator> evaluator_ptr() const noexcept { return evaluator_; }
  const ThetaMatrix& theta() const noexcept { return theta_; }
  const Tolerances& tolerances() const noexcept { return tol_; }
  Index charge_dim() const noexcept { return theta_.dim(); }

  ExtensionProblem with_theta(ThetaMatrix theta) const {
    return ExtensionProblem(evaluator_, std::move(theta), tol_);
  }

 private:
  std::shared_ptr<const GammaEvaluator> evaluator_;
  ThetaMatrix theta_;
  Tolerances tol_;
};

namespace detail {

inline CMatrix checked_gamma(const GammaEvaluator& ev, Complex z) {
  ev.require_resolvent(z);
  CMatrix g = ev.gamma(z);
  if (is_real_point(z)) {
    const double defect = hermitian_defect(g);
    if (defect > kHermitianTolerance * (1.0 + max_abs(g)))
      throw Error(ErrorKind::NotHermitian,
                  "Gamma(" + format_complex(z) + ") is not hermitian (defect " +
                      std::to_string(defect) + ")");
    g = hermitian_part(g);
  }
  return g;
}

}  // namespace detail

/// Theta + Gamma(z). Symmetrized when z is real.
inline CMatrix gamma_theta(const ExtensionProblem& problem, Complex z) {
  return problem.theta().entries() + detail::checked_gamma(problem.evaluator(), z);
}

/// Smallest eigenvalue of a hermitian matrix; realizes the lower bound
/// functional gamma(M) = inf <l, M l> over unit l.
inline double min_eig_hermitian(const CMatrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw Error(ErrorKind::DimensionMismatch, "min_eig_hermitian needs a non-empty square matrix");
  if (hermitian_defect(m) > kHermitianTolerance * (1.0 + max_abs(m)))
    throw Error(ErrorKind::NotHermitian, "matrix is not hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

/// Perturbed resolvent R(z) f + G(z) (Theta + Gamma(z))^{-1} Gbreve(z) f.
///
/// The pencil counts as singular when its smallest singular value falls
/// below tol.linear * (|Theta| + |Gamma(z)|); the sum of the two norms is
/// the scale at which cancellation shows up, and stays meaningful for N = 1.
inline CVector krein_apply(const ExtensionProblem& problem, Complex z, const CVector& f) {
  const GammaEvaluator& ev = problem.evaluator();
  const CMatrix gamma = detail::checked_gamma(ev, z);
  const CMatrix pencil = problem.theta().entries() + gamma;
  Eigen::JacobiSVD<CMatrix> svd(pencil, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const double scale = spectral_norm(problem.theta().entries()) + spectral_norm(gamma);
  if (s(s.size() - 1) <= problem.tolerances().linear * scale)
    throw Error(ErrorKind::SingularPencil,
                "Theta + Gamma(z) is singular at z = " + format_complex(z) +
                    " (z is a pole of the perturbed resolvent)");
  const CVector trace = ev.gbreve_apply(z, f);
  const CVector charge = svd.solve(trace);
  return ev.resolvent_apply(z, f) + ev.g_apply(z, charge);
}

enum class Admissibility { none, plus, minus, both };

constexpr std::string_view to_string(Admissibility a) noexcept {
  switch (a) {
    case Admissibility::none: return "none";
    case Admissibility::plus: return "plus";
    case Admissibility::minus: return "minus";
    case Admissibility::both: return "both";
  }
  return "none";
}

/// Membership of a real point in W+ = {gamma(Gamma) > -gamma(Theta)} and
/// W- = {gamma(-Gamma) > -gamma(-Theta)}. Equality counts as outside.
inline Admissibility admissible_real(const ExtensionProblem& problem, double lambda) {
  const CMatrix gamma = detail::checked_gamma(problem.evaluator(), Complex(lambda, 0.0));
  const CMatrix& theta = problem.theta().entries();
  const bool plus = min_eig_hermitian(gamma) > -min_eig_hermitian(theta);
  const bool minus = min_eig_hermitian(-gamma) > -min_eig_hermitian(-theta);
  if (plus && minus) return Admissibility::both;
  if (plus) return Admissibility::plus;
  if (minus) return Admissibility::minus;
  return Admissibility::none;
}

/// Linear coefficient vector of a charge under the backend's convention.
inline CVector charge_coefficients(const GammaEvaluator& ev, const CVector& charge) {
  return ev.conjugates_charges() ? CVector(charge.conjugate()) : charge;
}

/// tau(phi_reg) - Theta Q. For a bound state (z0, Q) this equals
/// -(Theta + Gamma(z0)) Q.
inline CVector boundary_residual(const ExtensionProblem& problem, const CVector& trace_of_regular_part,
                                 const CVector& charge) {
  if (trace_of_regular_part.size() != problem.charge_dim() || charge.size() != problem.charge_dim())
    throw Error(ErrorKind::DimensionMismatch, "boundary_residual: vector sizes must equal N");
  return trace_of_regular_part -
         problem.theta().entries() * charge_coefficients(problem.evaluator(), charge);
}

}  // namespace kreinx
