#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kreinx/green.hpp"
#include "kreinx/laplacian.hpp"
#include "kreinx/multiplier.hpp"
#include "kreinx/special.hpp"
#include "oracles.hpp"

using namespace kreinx;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvariantError;
}

}  // namespace

TEST(FundamentalSolution, G0Examples) {
  EXPECT_NEAR(g0(3, 1.0), 1.0 / (4.0 * kPi), 1e-17);
  EXPECT_DOUBLE_EQ(g0(1, 2.0), -1.0);
  EXPECT_DOUBLE_EQ(g0(2, 1.0), 0.0);
  EXPECT_EQ(kind_of([] { g0(3, 0.0); }), ErrorKind::NonpositiveRadius);
  EXPECT_EQ(kind_of([] { g0(4, 1.0); }), ErrorKind::InvalidModel);
}

TEST(FundamentalSolution, GzExamples) {
  EXPECT_NEAR(gz(1, 0.0, 4.0).real(), 0.25, 1e-16);
  EXPECT_NEAR(gz(3, 1.0, 1.0).real(), std::exp(-1.0) / (4.0 * kPi), 1e-17);
  EXPECT_NEAR(gz(3, 1.0, 1.0).real(), 0.02927491576215958, 1e-16);
  EXPECT_LT(std::abs(gz(2, 50.0, 1.0)), 1e-20);
  EXPECT_GT(std::abs(gz(2, 50.0, 1.0)), 0.0);
  EXPECT_EQ(kind_of([] { gz(3, 1.0, -1.0); }), ErrorKind::BranchCut);
  EXPECT_EQ(kind_of([] { gz(3, 1.0, 0.0); }), ErrorKind::BranchCut);
  EXPECT_EQ(kind_of([] { gz(2, 0.0, 1.0); }), ErrorKind::NonpositiveRadius);
  // Just above the cut is fine and decays.
  EXPECT_LT(std::abs(gz(3, 5.0, Complex(-1.0, 1e-3))), 1.0);
}

TEST(FundamentalSolution, ComplexZMatchesClosedForm) {
  for (Complex z : {Complex(2.0, 1.0), Complex(-3.0, 0.5), Complex(0.1, -4.0)})
    for (double r : {0.1, 1.0, 3.0})
      for (int dim : {1, 3}) EXPECT_LT(std::abs(gz(dim, r, z) - oracle::gz_closed(dim, r, z)), 1e-15);
}

TEST(FundamentalSolution, TwoDimensionalUsesK0) {
  const Complex z(4.0, 0.0);
  EXPECT_NEAR(gz(2, 0.5, z).real(), 0.4210244382407083 / (2.0 * kPi), 1e-12);
  // sqrt(z) r = 1 + i at z = 2i, r = 1.
  EXPECT_LT(std::abs(gz(2, 1.0, Complex(0.0, 2.0)) - oracle::kK0OnePlusI / (2.0 * kPi)), 1e-12);
}

TEST(RenormalizedDiagonal, Examples) {
  EXPECT_NEAR(renormalized_diagonal(3, 1.0).real(), 1.0 / (4.0 * kPi), 1e-17);
  EXPECT_NEAR(renormalized_diagonal(2, 4.0).real(), std::numbers::egamma / (2.0 * kPi), 1e-15);
  EXPECT_NEAR(renormalized_diagonal(1, 1.0).real(), -0.5, 1e-16);
  EXPECT_EQ(kind_of([] { renormalized_diagonal(2, -1.0); }), ErrorKind::BranchCut);
}

TEST(RenormalizedDiagonal, IsTheLimitOfTheDifference) {
  // Linear Richardson extrapolation of (G - G_z)(r) from r = 1e-4, 1e-5,
  // checked against r = 1e-3 as well.
  for (int dim : {1, 2, 3}) {
    for (Complex z : {Complex(1.0, 0.0), Complex(4.0, 0.0), Complex(2.0, 3.0)}) {
      const LaplacianKernel k(dim);
      const Complex f3 = k.difference(1e-3, z), f4 = k.difference(1e-4, z), f5 = k.difference(1e-5, z);
      const Complex limit = (10.0 * f5 - f4) / 9.0;
      const Complex coarse = (10.0 * f4 - f3) / 9.0;
      EXPECT_LT(std::abs(limit - k.renormalized_diagonal(z)), 1e-7) << dim << " " << z;
      EXPECT_LT(std::abs(coarse - k.renormalized_diagonal(z)), 1e-5) << dim << " " << z;
    }
  }
}

TEST(FundamentalSolution, OneDimensionalKernelSolvesTheEquation) {
  const double h = 1e-3;
  for (double z : {1.0, 4.0}) {
    auto g = [&](double x) { return gz(1, std::abs(x), z).real(); };
    for (double x : {0.5, 1.0, 2.0, -1.5}) {
      const double second = (g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h);
      EXPECT_NEAR(second, z * g(x), 1e-6) << x;
    }
    const double jump = (g(h) - g(0.0)) / h - (g(0.0) - g(-h)) / h;
    EXPECT_NEAR(jump, -1.0, 2.0 * std::sqrt(z) * h);
  }
}

TEST(GammaMatrix, Examples) {
  const CMatrix one = gamma_matrix(PointSet(3, {{0.0, 0.0, 0.0}}), 1.0);
  EXPECT_NEAR(one(0, 0).real(), 0.07957747154594767, 1e-16);
  const CMatrix two = gamma_matrix(PointSet(3, {{0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}), 1.0);
  EXPECT_NEAR(two(0, 1).real(), (1.0 - std::exp(-1.0)) / (4.0 * kPi), 1e-16);
  EXPECT_NEAR(two(0, 1).real(), 0.05030255578378809, 1e-16);
  EXPECT_EQ(two(0, 1), two(1, 0));
  EXPECT_EQ(kind_of([] { PointSet(3, {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}); }), ErrorKind::InvalidPointSet);
  EXPECT_EQ(kind_of([] { PointSet(1, {{0.0, 1.0, 0.0}}); }), ErrorKind::InvalidPointSet);
  EXPECT_EQ(kind_of([] { PointSet(2, {}); }), ErrorKind::InvalidPointSet);
}

TEST(GammaMatrix, ConjugateSymmetryAndRealHermitian) {
  const PointSet ps(2, {{0.0, 0.0, 0.0}, {1.0, 0.5, 0.0}, {-0.3, 2.0, 0.0}});
  for (Complex z : {Complex(1.0, 2.0), Complex(-5.0, 0.1), Complex(0.3, -0.7)}) {
    const CMatrix lhs = gamma_matrix(ps, std::conj(z));
    const CMatrix rhs = gamma_matrix(ps, z).adjoint();
    EXPECT_LT(max_abs(CMatrix(lhs - rhs)), 1e-14);
  }
  const CMatrix real = gamma_matrix(ps, 2.5);
  EXPECT_TRUE(is_exactly_hermitian(real));
}

TEST(K0, FrozenHighPrecisionValues) {
  for (const auto& [x, value] : oracle::kFrozenK0) EXPECT_NEAR(k0_bessel(x), value, 1e-10) << x;
  EXPECT_NEAR(k0_bessel(1.0), 0.4210244382, 1e-10);
  EXPECT_NEAR(k0_bessel(2.0), 0.1138938727, 1e-10);
  EXPECT_LT(std::abs(k0_bessel(Complex(1.0, 1.0)) - oracle::kK0OnePlusI), 1e-10);
  EXPECT_LT(std::abs(k0_bessel(Complex(3.0, -2.0)) - oracle::kK0ThreeMinusTwoI), 1e-10);
}

TEST(K0, MatchesLongDoubleSeries) {
  for (double x = 0.01; x <= 8.0; x *= 1.13)
    EXPECT_NEAR(k0_bessel(x), static_cast<double>(oracle::k0_series(x)), 1e-10 * std::max(1.0, k0_bessel(x))) << x;
}

TEST(K0, ContinuousAcrossMethodSwitches) {
  for (double x : {2.0, 25.0}) {
    const double below = k0_bessel(std::nextafter(x, 0.0));
    const double above = k0_bessel(std::nextafter(x, 100.0));
    EXPECT_LT(std::abs(below - above), 1e-12 * k0_bessel(x)) << x;
  }
}

TEST(K0, MonotoneAndDomain) {
  EXPECT_GT(k0_bessel(1.0), k0_bessel(2.0));
  double prev = k0_bessel(0.05);
  for (double x = 0.1; x < 60.0; x += 0.1) {
    const double v = k0_bessel(x);
    ASSERT_LT(v, prev) << x;
    prev = v;
  }
  EXPECT_EQ(kind_of([] { k0_bessel(0.0); }), ErrorKind::NonpositiveArgument);
  EXPECT_EQ(kind_of([] { k0_bessel(-1.0); }), ErrorKind::NonpositiveArgument);
  // Complex argument on the real axis agrees with the real routine.
  for (double x : {0.5, 3.0, 30.0})
    EXPECT_LT(std::abs(k0_bessel(Complex(x, 0.0)) - k0_bessel(x)), 1e-12 * k0_bessel(x));
}

TEST(GbreveApply1D, ZeroInputGivesZero) {
  const PointSet ps = PointSet::on_line({0.0, 1.0});
  const Grid1D grid = Grid1D::covering(-2.0, 2.0, 0.01);
  EXPECT_EQ(gbreve_apply_1d(ps, 1.0, grid, CVector::Zero(grid.n)).norm(), 0.0);
}

TEST(GbreveApply1D, NarrowBumpApproachesKernelAtZero) {
  // Triangle bumps of unit mass at y = 0; linear Richardson in the width.
  const PointSet ps = PointSet::on_line({0.0});
  const double z = 1.0;
  auto apply = [&](double eps) {
    const double h = eps / 100.0;
    const Grid1D grid = Grid1D::covering(-eps, eps, h);
    CVector f(grid.n);
    for (Index i = 0; i < grid.n; ++i) f(i) = std::max(0.0, 1.0 - std::abs(grid.x(i)) / eps) / eps;
    return gbreve_apply_1d(ps, z, grid, f)(0).real();
  };
  const double extrapolated = 2.0 * apply(1e-3) - apply(2e-3);
  EXPECT_NEAR(extrapolated, 0.5, 1e-6);
  EXPECT_GT(std::abs(apply(2e-3) - 0.5), 1e-5);  // the raw value is not yet converged
}

TEST(GbreveApply1D, GaussianMatchesErfcClosedForm) {
  // int exp(-|y - x|) exp(-x^2) dx = sqrt(pi)/2 e^{1/4} [e^{-y} erfc(1/2 - y) + e^{y} erfc(1/2 + y)].
  const PointSet ps = PointSet::on_line({0.3, -1.2});
  const Grid1D grid = Grid1D::covering(-9.0, 9.0, 1e-3);
  CVector f(grid.n);
  for (Index i = 0; i < grid.n; ++i) f(i) = std::exp(-grid.x(i) * grid.x(i));
  const CVector out = gbreve_apply_1d(ps, 1.0, grid, f);
  for (Index j = 0; j < 2; ++j) {
    const double y = ps[j][0];
    const double exact = std::sqrt(kPi) / 2.0 * std::exp(0.25) *
                         (std::exp(-y) * std::erfc(0.5 - y) + std::exp(y) * std::erfc(0.5 + y)) / 2.0;
    EXPECT_NEAR(out(j).real(), exact, 1e-6);
  }
}

TEST(GbreveApply1D, TranslationCovariance) {
  const Grid1D grid = Grid1D::covering(-5.0, 5.0, 0.01);
  CVector f(grid.n);
  for (Index i = 0; i < grid.n; ++i) f(i) = Complex(std::exp(-grid.x(i) * grid.x(i)), std::sin(grid.x(i)));
  const double shift = 0.37;
  const Grid1D moved{grid.x0 + shift, grid.h, grid.n};
  const CVector a = gbreve_apply_1d(PointSet::on_line({0.3, -1.2}), Complex(2.0, 1.0), grid, f);
  const CVector b = gbreve_apply_1d(PointSet::on_line({0.3 + shift, -1.2 + shift}), Complex(2.0, 1.0), moved, f);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GbreveApply1D, RejectsCoarseGrid) {
  const Grid1D grid = Grid1D::covering(-1.0, 1.0, 0.2);
  EXPECT_EQ(kind_of([&] { gbreve_apply_1d(PointSet::on_line({0.0}), 4.0, grid, CVector::Ones(grid.n)); }),
            ErrorKind::GridTooCoarse);
}

TEST(Overlap3D, MatchesResolventIdentityClosedForm) {
  // int G_w(x - a) G_z(x - b) dx = (G_w(d) - G_z(d)) / (z - w).
  for (double d : {0.5, 1.0, 3.0}) {
    for (auto [w, z] : {std::pair{Complex(1.0, 0.0), Complex(4.0, 0.0)}, std::pair{Complex(2.0, 1.0), Complex(0.5, -2.0)}}) {
      const Complex exact = (oracle::gz_closed(3, d, w) - oracle::gz_closed(3, d, z)) / (z - w);
      EXPECT_LT(std::abs(overlap_3d(w, z, d) - exact), 1e-12 * std::abs(exact)) << d;
    }
  }
  // Coincident centres: 1 / (4 pi (sqrt(w) + sqrt(z))).
  EXPECT_NEAR(overlap_3d(1.0, 4.0, 0.0).real(), 1.0 / (4.0 * kPi * 3.0), 1e-15);
}

TEST(Multiplier, ValidatesSymbol) {
  EXPECT_EQ(kind_of([] { Multiplier1D({0.0, 1.0}); }), ErrorKind::InvalidSymbol);
  EXPECT_EQ(kind_of([] { Multiplier1D({0.0, 0.0, 1.0}); }), ErrorKind::InvalidSymbol);
  EXPECT_EQ(kind_of([] { Multiplier1D({0.0, 0.0, 0.0, -1.0}); }), ErrorKind::InvalidSymbol);
  EXPECT_NO_THROW(Multiplier1D({0.0, 0.0, -1.0, 0.0}));  // trailing zero trimmed
  const Multiplier1D m({-2.0, 0.0, -1.0}, {2.0});
  EXPECT_NEAR(m(0.0), 0.0, 1e-15);
  EXPECT_GE(m.sup_bound(), 0.0);
  EXPECT_LT(m.sup_bound(), 1e-3);
  EXPECT_EQ(m.degree(), 2);
}

TEST(Multiplier, RangeHit) {
  const Multiplier1D m = Multiplier1D::laplacian();
  EXPECT_EQ(kind_of([&] { multiplier_gz_1d(m, -1.0, 0.0); }), ErrorKind::SymbolRangeHit);
  EXPECT_EQ(kind_of([&] { multiplier_gz_1d(m, 0.0, 0.0); }), ErrorKind::SymbolRangeHit);
}

TEST(Multiplier, LaplacianSymbolMatchesClosedForm) {
  const Multiplier1D m = Multiplier1D::laplacian();
  EXPECT_NEAR(multiplier_gz_1d(m, 4.0, 0.0).real(), 0.25, 1e-8);
  EXPECT_NEAR(multiplier_gz_1d(m, 4.0, 1.0).real(), std::exp(-2.0) / 4.0, 1e-8);
  for (double z : {0.5, 1.0, 2.0, 4.0, 9.0})
    for (double x : {0.0, 0.3, 1.0, 2.5, 5.0})
      EXPECT_LT(std::abs(multiplier_gz_1d(m, z, x) - oracle::gz_closed(1, x, z)), 1e-8) << z << " " << x;
  const Complex zc(2.0, 1.0);
  EXPECT_LT(std::abs(multiplier_gz_1d(m, zc, 0.7) - oracle::gz_closed(1, 0.7, zc)), 1e-8);
}

TEST(Multiplier, ScaledAndQuarticSymbols) {
  const Multiplier1D scaled({0.0, 0.0, -2.0});
  for (double x : {0.0, 0.7, 2.0}) {
    const double exact = std::exp(-std::sqrt(1.5) * x) / (2.0 * std::sqrt(6.0));
    EXPECT_NEAR(multiplier_gz_1d(scaled, 3.0, x).real(), exact, 1e-9) << x;
  }
  const Multiplier1D quartic({0.0, 0.0, 0.0, 0.0, -1.0});
  for (double x : {0.0, 0.7, 2.0, 4.0})
    EXPECT_NEAR(multiplier_gz_1d(quartic, 3.0, x).real(), oracle::quartic_kernel(3.0, x), 1e-9) << x;
}

TEST(Multiplier, DifferentialDifferenceSymbolSelfConverges) {
  const Multiplier1D m({-2.0, 0.0, -1.0}, {2.0});
  FourierOptions coarse, fine;
  coarse.rel_tol = 1e-9;
  fine.rel_tol = 1e-12;
  const Complex a = multiplier_gz_1d(m, 1.0, 0.0, coarse);
  const Complex b = multiplier_gz_1d(m, 1.0, 0.0, fine);
  EXPECT_LT(std::abs(a - b), 1e-8);
  // Between the Laplacian value 1/2 and 0: the extra term only lowers the symbol.
  EXPECT_GT(b.real(), 0.0);
  EXPECT_LT(b.real(), 0.5);
}

TEST(Multiplier, AnchoredGamma) {
  const Multiplier1D m = Multiplier1D::laplacian();
  const PointSet ps = PointSet::on_line({0.0, 1.3});
  const CMatrix g = anchored_gamma_1d(m, ps, 4.0, 1.0);
  EXPECT_NEAR(g(0, 0).real(), 0.25, 1e-8);
  EXPECT_NEAR(g(0, 1).real(), std::exp(-1.3) / 2.0 - std::exp(-2.6) / 4.0, 1e-8);
  EXPECT_EQ(max_abs(anchored_gamma_1d(m, ps, 2.5, 2.5)), 0.0);
  EXPECT_TRUE(is_exactly_hermitian(g));
  const Complex z(3.0, 2.0);
  const CMatrix lhs = anchored_gamma_1d(m, ps, std::conj(z), 1.0);
  const CMatrix rhs = anchored_gamma_1d(m, ps, z, 1.0).adjoint();
  EXPECT_LT(max_abs(CMatrix(lhs - rhs)), 1e-12);
}
