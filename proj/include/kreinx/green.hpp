#pragma once

// Fundamental solutions of -Delta (the kernel G) and of -Delta + z (the
// kernel G_z) on R^n, n = 1, 2, 3, and the finite part lim_{r->0} (G - G_z).
//
//   n = 1:  G = -r/2             G_z = exp(-sqrt(z) r) / (2 sqrt(z))
//   n = 2:  G = -log(r)/(2 pi)   G_z = K0(sqrt(z) r) / (2 pi)
//   n = 3:  G = 1/(4 pi r)       G_z = exp(-sqrt(z) r) / (4 pi r)
//
// sqrt is the principal branch, so G_z decays for every z off (-inf, 0].

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "kreinx/errors.hpp"
#include "kreinx/linalg.hpp"
#include "kreinx/special.hpp"

namespace kreinx {

inline bool on_branch_cut(Complex z) { return z.imag() == 0.0 && z.real() <= 0.0; }

inline void require_off_branch_cut(Complex z) {
  if (on_branch_cut(z))
    throw Error(ErrorKind::BranchCut, "z = " + format_complex(z) + " lies on (-inf, 0]");
}

inline void require_dim(int dim) {
  if (dim < 1 || dim > 3) throw Error(ErrorKind::InvalidModel, "dimension must be 1, 2 or 3");
}

class LaplacianKernel {
 public:
  explicit LaplacianKernel(int dim) : dim_(dim) { require_dim(dim); }

  int dim() const noexcept { return dim_; }

  /// Surface measure of the unit sphere in R^dim.
  double sphere_measure() const noexcept {
    switch (dim_) {
      case 1: return 2.0;
      case 2: return 2.0 * std::numbers::pi;
      default: return 4.0 * std::numbers::pi;
    }
  }

  double g0(double r) const {
    if (!(r > 0.0)) throw Error(ErrorKind::NonpositiveRadius, "G needs r > 0");
    switch (dim_) {
      case 1: return -0.5 * r;
      case 2: return -std::log(r) / (2.0 * std::numbers::pi);
      default: return 1.0 / ((dim_ - 2) * sphere_measure() * std::pow(r, dim_ - 2));
    }
  }

  Complex gz(double r, Complex z) const {
    require_off_branch_cut(z);
    if (dim_ == 1 ? !(r >= 0.0) : !(r > 0.0))
      throw Error(ErrorKind::NonpositiveRadius, "G_z radius out of range");
    const Complex s = std::sqrt(z);
    switch (dim_) {
      case 1: return std::exp(-s * r) / (2.0 * s);
      case 2: {
        const Complex x = s * r;
        // K0 underflows long before the argument gets large; skip the work.
        if (x.real() > 700.0) return 0.0;
        return k0_bessel(x) / (2.0 * std::numbers::pi);
      }
      default: return std::exp(-s * r) / (4.0 * std::numbers::pi * r);
    }
  }

  /// lim_{r -> 0} (G - G_z)(r).
  Complex renormalized_diagonal(Complex z) const {
    require_off_branch_cut(z);
    const Complex s = std::sqrt(z);
    switch (dim_) {
      case 1: return -1.0 / (2.0 * s);
      case 2: return (std::log(s / 2.0) + std::numbers::egamma) / (2.0 * std::numbers::pi);
      default: return s / (4.0 * std::numbers::pi);
    }
  }

  /// (G - G_z)(r) for r > 0; the off-diagonal Gamma entry.
  Complex difference(double r, Complex z) const { return g0(r) - gz(r, z); }

 private:
  int dim_;
};

inline double g0(int dim, double r) { return LaplacianKernel(dim).g0(r); }
inline Complex gz(int dim, double r, Complex z) { return LaplacianKernel(dim).gz(r, z); }
inline Complex renormalized_diagonal(int dim, Complex z) {
  return LaplacianKernel(dim).renormalized_diagonal(z);
}

}  // namespace kreinx
