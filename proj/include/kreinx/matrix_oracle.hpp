#pragma once

// Finite-dimensional realization of the construction. A is an injective
// hermitian n x n matrix and tau a surjective N x n trace. Everything here is
// exact up to dense linear algebra, which makes it the ground truth the
// Krein path is checked against:
//
//   R(z) = (z - A)^{-1}        Gbreve(z) = tau R(z)      G(z) = R(z) tau^*
//   K(z) = z R(0) G(z)         Gamma(z)  = tau (R(0) - R(z)) tau^*
//
// and the additive form B = A + tau^* (Theta + tau R(0) tau^*)^{-1} tau, whose
// resolvent equals the Krein formula by the low-rank update identity.
//
// The density hypothesis on ker(tau) cannot hold in finite dimension; the
// identities are verified as algebra, not as statements about unbounded
// extensions.

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "kreinx/errors.hpp"
#include "kreinx/krein_core.hpp"
#include "kreinx/linalg.hpp"
#include "kreinx/random.hpp"

namespace kreinx {

class MatrixModel {
 public:
  MatrixModel(CMatrix a, CMatrix tau) : a_(std::move(a)), tau_(std::move(tau)) {
    if (a_.rows() == 0 || a_.rows() != a_.cols())
      throw Error(ErrorKind::InvalidModel, "A must be a non-empty square matrix");
    if (tau_.cols() != a_.rows() || tau_.rows() == 0)
      throw Error(ErrorKind::DimensionMismatch, "tau must have N >= 1 rows and n columns");
    if (tau_.rows() > tau_.cols())
      throw Error(ErrorKind::InvalidModel, "tau must satisfy N <= n");
    if (hermitian_defect(a_) > kHermitianTolerance * (1.0 + max_abs(a_)))
      throw Error(ErrorKind::NotHermitian, "A is not hermitian");
    a_ = hermitian_part(a_);

    Eigen::SelfAdjointEigenSolver<CMatrix> eig(a_);
    spectrum_ = eig.eigenvalues();
    eigenvectors_ = eig.eigenvectors();
    const double top = spectrum_.cwiseAbs().maxCoeff();
    if (!(spectrum_.cwiseAbs().minCoeff() > 1e-12 * top))
      throw Error(ErrorKind::InvalidModel, "A is not injective");

    const RVector s = singular_values(tau_);
    if (!(s(s.size() - 1) > 1e-12 * s(0)))
      throw Error(ErrorKind::InvalidModel, "tau is not surjective (rank < N)");

    const CMatrix a_inv = eigenvectors_ * spectrum_.cwiseInverse().cast<Complex>().asDiagonal() *
                          eigenvectors_.adjoint();
    trace_bound_ = spectral_norm(CMatrix(tau_ * a_inv));
  }

  const CMatrix& a() const noexcept { return a_; }
  const CMatrix& tau() const noexcept { return tau_; }
  Index n() const noexcept { return a_.rows(); }
  Index charge_dim() const noexcept { return tau_.rows(); }
  /// Eigenvalues of A, ascending.
  const RVector& spectrum() const noexcept { return spectrum_; }
  /// Orthonormal eigenvectors of A, columns ordered like spectrum().
  const CMatrix& eigenvectors() const noexcept { return eigenvectors_; }
  /// c = |tau A^{-1}|, the constant in |tau phi| <= c |A phi|.
  double trace_bound() const noexcept { return trace_bound_; }

  double spectrum_hit_distance() const { return 1e-12 * std::max(1.0, spectrum_.cwiseAbs().maxCoeff()); }

  bool in_resolvent_set(Complex z) const {
    for (Index i = 0; i < spectrum_.size(); ++i)
      if (std::abs(z - spectrum_(i)) <= spectrum_hit_distance()) return false;
    return true;
  }

 private:
  CMatrix a_;
  CMatrix tau_;
  RVector spectrum_;
  CMatrix eigenvectors_;
  double trace_bound_ = 0.0;
};

/// (z - A)^{-1} from the eigendecomposition of A; hermitian up to rounding
/// for real z even close to the spectrum.
inline CMatrix base_resolvent(const MatrixModel& model, Complex z) {
  if (!model.in_resolvent_set(z))
    throw Error(ErrorKind::SpectrumHit, "z = " + format_complex(z) + " is an eigenvalue of A");
  const CVector inv = (z - model.spectrum().cast<Complex>().array()).inverse().matrix();
  const CMatrix& u = model.eigenvectors();
  return u * inv.asDiagonal() * u.adjoint();
}

struct GMaps {
  CMatrix gbreve;  // N x n
  CMatrix g;       // n x N
  CMatrix k;       // n x N
};

inline GMaps g_maps(const MatrixModel& model, Complex z) {
  const CMatrix r = base_resolvent(model, z);
  const CMatrix r0 = base_resolvent(model, 0.0);
  GMaps out;
  out.gbreve = model.tau() * r;
  out.g = r * model.tau().adjoint();
  out.k = z * (r0 * out.g);
  return out;
}

/// tau (R(0) - R(z)) tau^*.
inline CMatrix gamma(const MatrixModel& model, Complex z) {
  const CMatrix diff = base_resolvent(model, 0.0) - base_resolvent(model, z);
  return model.tau() * diff * model.tau().adjoint();
}

/// Theta + tau R(0) tau^*, the pencil at the z = 0 anchor.
inline CMatrix anchor_pencil(const MatrixModel& model, const ThetaMatrix& theta) {
  if (theta.dim() != model.charge_dim())
    throw Error(ErrorKind::DimensionMismatch, "theta does not match the trace dimension");
  return theta.entries() + model.tau() * base_resolvent(model, 0.0) * model.tau().adjoint();
}

/// B = A + tau^* (Theta + tau R(0) tau^*)^{-1} tau.
inline CMatrix woodbury_extension(const MatrixModel& model, const ThetaMatrix& theta) {
  const CMatrix anchor = model.tau() * base_resolvent(model, 0.0) * model.tau().adjoint();
  const CMatrix pencil = anchor_pencil(model, theta);
  Eigen::JacobiSVD<CMatrix> svd(pencil, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const double scale = spectral_norm(theta.entries()) + spectral_norm(anchor);
  if (s(s.size() - 1) <= 1e-12 * scale)
    throw Error(ErrorKind::OracleDegenerate,
                "Theta + tau R(0) tau^* is singular; the extension has no additive form");
  const CMatrix correction = model.tau().adjoint() * svd.solve(model.tau());
  return hermitian_part(CMatrix(model.a() + correction));
}

/// Eigenvalues of the oracle matrix B, ascending.
inline std::vector<double> direct_eigs(const MatrixModel& model, const ThetaMatrix& theta) {
  const CMatrix b = woodbury_extension(model, theta);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(b, Eigen::EigenvaluesOnly);
  const RVector& ev = eig.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

/// GammaEvaluator over a MatrixModel. Fields are vectors of C^n.
class MatrixEvaluator final : public GammaEvaluator {
 public:
  explicit MatrixEvaluator(MatrixModel model) : model_(std::move(model)) {}

  const MatrixModel& model() const noexcept { return model_; }

  std::string name() const override { return "matrix backend"; }
  Index charge_dim() const override { return model_.charge_dim(); }
  bool in_resolvent_set(Complex z) const override { return model_.in_resolvent_set(z); }

  bool real_interval_in_resolvent_set(double a, double b) const override {
    if (!(a <= b)) return false;
    const double margin = model_.spectrum_hit_distance();
    for (Index i = 0; i < model_.spectrum().size(); ++i) {
      const double e = model_.spectrum()(i);
      if (e >= a - margin && e <= b + margin) return false;
    }
    return true;
  }

  CMatrix gamma(Complex z) const override { return kreinx::gamma(model_, z); }

  bool supports_field_actions() const override { return true; }
  Index field_dim() const override { return model_.n(); }

  CVector resolvent_apply(Complex z, const CVector& f) const override {
    check_field(f);
    return base_resolvent(model_, z) * f;
  }

  CVector gbreve_apply(Complex z, const CVector& f) const override {
    check_field(f);
    return model_.tau() * (base_resolvent(model_, z) * f);
  }

  CVector g_apply(Complex z, const CVector& q) const override {
    if (q.size() != charge_dim()) throw Error(ErrorKind::DimensionMismatch, "charge has wrong size");
    return base_resolvent(model_, z) * (model_.tau().adjoint() * q);
  }

 private:
  void check_field(const CVector& f) const {
    if (f.size() != model_.n()) throw Error(ErrorKind::DimensionMismatch, "field has wrong size");
  }

  MatrixModel model_;
};

// Random models: A = U diag(s) U^* with U unitary (QR of a complex Gaussian
// matrix) and |s_i| in [0.1, 10] with random sign; tau complex Gaussian.

inline CMatrix random_unitary(Rng& rng, Index n) {
  const CMatrix g = rng.complex_gaussian(n, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  // Fix column phases so the distribution does not depend on QR sign choices.
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

inline MatrixModel random_model(Rng& rng, Index n, Index charge_dim) {
  const CMatrix u = random_unitary(rng, n);
  RVector s(n);
  for (Index i = 0; i < n; ++i) {
    const double mag = rng.uniform(0.1, 10.0);
    s(i) = rng.uniform() < 0.5 ? -mag : mag;
  }
  CMatrix a = u * s.cast<Complex>().asDiagonal() * u.adjoint();
  a = hermitian_part(a);
  return MatrixModel(std::move(a), rng.complex_gaussian(charge_dim, n));
}

/// Gaussian hermitian matrix; exactly equal to its conjugate transpose.
inline ThetaMatrix random_theta(Rng& rng, Index n) {
  const CMatrix g = rng.complex_gaussian(n, n);
  return ThetaMatrix(CMatrix((g + g.adjoint()) * 0.5));
}

struct RandomSystem {
  MatrixModel model;
  ThetaMatrix theta;
};

/// Draws n in [2, max_n], N in [1, min(max_charge, n)], a model and a theta.
/// Theta is redrawn while the anchor pencil is close to singular, so that
/// the oracle B stays well conditioned.
inline RandomSystem random_system(Rng& rng, Index max_n = 12, Index max_charge = 4) {
  const Index n = rng.uniform_int(2, max_n);
  const Index charge = rng.uniform_int(1, std::min(max_charge, n));
  MatrixModel model = random_model(rng, n, charge);
  const CMatrix anchor = model.tau() * base_resolvent(model, 0.0) * model.tau().adjoint();
  for (int attempt = 0;; ++attempt) {
    ThetaMatrix theta = random_theta(rng, charge);
    const CMatrix pencil = theta.entries() + anchor;
    const double floor = 0.05 * (spectral_norm(theta.entries()) + spectral_norm(anchor));
    if (min_singular_value(pencil) > floor || attempt == 64) return {std::move(model), std::move(theta)};
  }
}

}  // namespace kreinx
