#pragma once

// Modified Bessel function K0 for real and complex arguments.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "kreinx/errors.hpp"
#include "kreinx/linalg.hpp"

namespace kreinx {

namespace detail {

/// K0 = -(log(x/2) + gamma_E) I0(x) + sum_k (x^2/4)^k / (k!)^2 H_k.
/// Accurate for |x| <= 2; beyond that the two sums cancel.
template <typename T>
T k0_series(T x) {
  const T t = x * x / T(4);
  T term = T(1);  // (x^2/4)^k / (k!)^2
  T i0 = T(1);
  T tail = T(0);
  double harmonic = 0.0;
  for (int k = 1; k < 60; ++k) {
    term *= t / T(double(k) * double(k));
    harmonic += 1.0 / k;
    i0 += term;
    tail += term * T(harmonic);
    if (std::abs(term) * harmonic < 1e-18 * std::abs(tail)) break;
  }
  return -(std::log(x / T(2)) + T(std::numbers::egamma)) * i0 + tail;
}

/// K0 = int_0^inf exp(-x cosh t) dt by the trapezoid rule. The integrand is
/// analytic in the strip |Im t| < pi/2 - |arg x|, so the rule converges
/// geometrically. The peak at t = 0 has width ~ |x|^{-1/2}, so the step
/// shrinks with it to keep the relative error near 1e-16.
template <typename T>
T k0_integral(T x) {
  const double re = std::real(x);
  const double arg = std::abs(std::arg(std::complex<double>(std::real(x), std::imag(x))));
  const double strip = std::numbers::pi / 2 - arg;
  const double h = std::min({0.25, std::numbers::pi * strip / 20.0, 0.4 / std::sqrt(std::abs(x))});
  const double t_max = std::acosh(1.0 + 42.0 / re);
  T sum = 0.5 * std::exp(-x);
  for (double t = h; t <= t_max + h; t += h) sum += std::exp(-x * std::cosh(t));
  return sum * h;
}

/// Large-argument expansion sqrt(pi/2x) e^{-x} sum_k a_k x^{-k}.
inline double k0_asymptotic(double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double next = term * -((2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) * sum;
}

}  // namespace detail

/// K0(x) for real x > 0, absolute error below 1e-10 (in practice ~1e-15).
inline double k0_bessel(double x) {
  if (!(x > 0.0)) throw Error(ErrorKind::NonpositiveArgument, "K0 needs x > 0");
  if (x <= 2.0) return detail::k0_series(x);
  if (x <= 25.0) return detail::k0_integral(x);
  return detail::k0_asymptotic(x);
}

/// K0(x) for complex x with Re x > 0.
inline Complex k0_bessel(Complex x) {
  if (!(x.real() > 0.0)) throw Error(ErrorKind::NonpositiveArgument, "K0 needs Re x > 0");
  if (x.imag() == 0.0) return k0_bessel(x.real());
  if (std::abs(x) <= 2.0) return detail::k0_series(x);
  return detail::k0_integral(x);
}

}  // namespace kreinx
