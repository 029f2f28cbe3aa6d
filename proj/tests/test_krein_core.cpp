#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kreinx/krein_core.hpp"
#include "kreinx/laplacian.hpp"
#include "kreinx/matrix_oracle.hpp"

using namespace kreinx;

namespace {

MatrixModel worked_model() {
  CMatrix a(2, 2);
  a << 1, 0, 0, -1;
  CMatrix tau(1, 2);
  tau << 1, 1;
  return MatrixModel(a, tau);
}

ExtensionProblem worked_problem(double theta = 1.0) {
  return ExtensionProblem(std::make_shared<MatrixEvaluator>(worked_model()), ThetaMatrix::scalar(theta));
}

ExtensionProblem single_point_3d(double alpha) {
  return ExtensionProblem(std::make_shared<LaplacianEvaluator>(PointSet(3, {{0.0, 0.0, 0.0}})),
                          ThetaMatrix::scalar(alpha));
}

}  // namespace

TEST(ThetaMatrix, RequiresExactHermitianInput) {
  CMatrix m(2, 2);
  m << 0, 1, 0, 0;
  try {
    ThetaMatrix t{m};
    FAIL() << "accepted a non-hermitian theta";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotHermitian);
  }
  CMatrix tiny(1, 1);
  tiny << Complex(1.0, 1e-300);
  EXPECT_THROW(ThetaMatrix{tiny}, Error);
  CMatrix ok(2, 2);
  ok << 2, Complex(1, -3), Complex(1, 3), -1;
  EXPECT_NO_THROW(ThetaMatrix{ok});
}

TEST(ExtensionProblem, ThetaDimensionMustMatchTrace) {
  try {
    ExtensionProblem p(std::make_shared<MatrixEvaluator>(worked_model()), ThetaMatrix::multiple_of_identity(2, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(GammaTheta, WorkedExampleClosedForm) {
  const auto p = worked_problem();
  EXPECT_NEAR(gamma_theta(p, 0.0)(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(gamma_theta(p, 2.0)(0, 0).real(), -1.0 / 3.0, 1e-15);
  // Gamma(z) = -2z / (z^2 - 1) at a complex point.
  const Complex z(0.3, 1.7);
  const Complex expected = 1.0 - 2.0 * z / (z * z - 1.0);
  EXPECT_LT(std::abs(gamma_theta(p, z)(0, 0) - expected), 1e-14);
}

TEST(GammaTheta, SinglePoint3DVanishesAtBoundState) {
  const auto p = single_point_3d(-1.0 / (4.0 * std::numbers::pi));
  EXPECT_LT(std::abs(gamma_theta(p, 1.0)(0, 0)), 1e-16);
}

TEST(GammaTheta, OutsideResolventSet) {
  const auto p = worked_problem();
  try {
    gamma_theta(p, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutsideResolventSet);
  }
  EXPECT_THROW(gamma_theta(single_point_3d(0.1), -2.0), Error);
}

TEST(KreinApply, MatchesOracleResolvent) {
  const MatrixModel model = worked_model();
  const auto p = worked_problem();
  const CMatrix b = woodbury_extension(model, p.theta());
  const Complex z(0.0, 2.0);
  CVector f(2);
  f << Complex(0.3, -1.1), Complex(2.0, 0.5);
  CMatrix shifted = -b;
  shifted.diagonal().array() += z;
  const CVector direct = shifted.partialPivLu().solve(f);
  const CVector krein = krein_apply(p, z, f);
  EXPECT_LT((krein - direct).norm() / direct.norm(), 1e-10);
}

TEST(KreinApply, ZeroTraceGivesBaseResolvent) {
  const MatrixModel model = worked_model();
  const auto p = worked_problem();
  const Complex z(0.5, 0.5);
  // tau R(z) f = 0 for f = (z - A) phi0 with phi0 in ker(tau).
  CVector phi0(2);
  phi0 << 1.0, -1.0;
  CMatrix shifted = -model.a();
  shifted.diagonal().array() += z;
  const CVector f = shifted * phi0;
  EXPECT_LT((krein_apply(p, z, f) - base_resolvent(model, z) * f).norm(), 1e-15);
}

TEST(KreinApply, SingularPencilAtPole) {
  const auto p = worked_problem();
  try {
    krein_apply(p, 1.0 + std::sqrt(2.0), CVector::Ones(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularPencil);
  }
}

TEST(MinEigHermitian, Examples) {
  EXPECT_DOUBLE_EQ(min_eig_hermitian(CMatrix::Identity(3, 3)), 1.0);
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = -2.0;
  EXPECT_NEAR(min_eig_hermitian(d), -2.0, 1e-15);
  CMatrix swap(2, 2);
  swap << 0, 1, 1, 0;
  EXPECT_NEAR(min_eig_hermitian(swap), -1.0, 1e-15);
  CMatrix bad(2, 2);
  bad << 0, 1, 2, 0;
  EXPECT_THROW(min_eig_hermitian(bad), Error);
}

TEST(AdmissibleReal, WorkedExample) {
  const auto p = worked_problem();
  const Admissibility at0 = admissible_real(p, 0.0);
  EXPECT_TRUE(at0 == Admissibility::plus || at0 == Admissibility::both);
  EXPECT_EQ(admissible_real(p, 2.0), Admissibility::minus);
  EXPECT_EQ(to_string(admissible_real(p, 2.0)), "minus");
}

TEST(AdmissibleReal, LargeThetaFixesTheSide) {
  // |Gamma| << 1e6: Theta + Gamma is definite with the sign of Theta, and
  // gamma(-Gamma) > 1e6 (resp. gamma(Gamma) > 1e6) never holds.
  const auto pos = worked_problem(1e6);
  const auto neg = worked_problem(-1e6);
  for (double lambda : {-50.0, -3.0, -0.5, 0.0, 0.5, 3.0, 50.0}) {
    EXPECT_EQ(admissible_real(pos, lambda), Admissibility::plus) << lambda;
    EXPECT_EQ(admissible_real(neg, lambda), Admissibility::minus) << lambda;
  }
}

TEST(AdmissibleReal, EqualityIsOutside) {
  // Gamma(0) = 0 and Theta = 0: both inequalities are equalities.
  const auto p = worked_problem(0.0);
  EXPECT_EQ(admissible_real(p, 0.0), Admissibility::none);
}

TEST(AdmissibleReal, MonotoneUnderThetaShift) {
  const auto p = worked_problem(-0.7);
  for (double lambda : {-3.0, -0.5, 0.2, 0.9, 1.2, 2.0, 5.0}) {
    const bool before = admissible_real(p, lambda) == Admissibility::plus ||
                        admissible_real(p, lambda) == Admissibility::both;
    const auto shifted = p.with_theta(p.theta().shifted(0.25));
    const bool after = admissible_real(shifted, lambda) == Admissibility::plus ||
                       admissible_real(shifted, lambda) == Admissibility::both;
    EXPECT_TRUE(!before || after) << lambda;
  }
}

TEST(BoundaryResidual, Examples) {
  const auto p = worked_problem();
  EXPECT_EQ(boundary_residual(p, CVector::Zero(1), CVector::Zero(1)).norm(), 0.0);

  // Bound state: tau(phi_reg) = -Gamma(z0) Q.
  const double z0 = 1.0 + std::sqrt(2.0);
  CVector q(1);
  q << 1.0;
  const CVector trace = -(detail::checked_gamma(p.evaluator(), z0) * q);
  EXPECT_LT(boundary_residual(p, trace, q).norm(), 1e-10);

  const auto p3 = single_point_3d(-1.0 / (4.0 * std::numbers::pi));
  const CVector trace3 = -(p3.evaluator().gamma(1.0) * q);
  EXPECT_LT(boundary_residual(p3, trace3, q).norm(), 1e-16);
  EXPECT_THROW(boundary_residual(p3, CVector::Zero(2), q), Error);
}

TEST(ChargeCoefficients, FollowBackendConvention) {
  CVector q(2);
  q << Complex(1, 2), Complex(-3, 0.5);
  const MatrixEvaluator matrix(MatrixModel(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)));
  const LaplacianEvaluator lap(PointSet::on_line({0.0, 1.0}));
  EXPECT_EQ(charge_coefficients(matrix, q), q);
  EXPECT_EQ(charge_coefficients(lap, q), CVector(q.conjugate()));
}
