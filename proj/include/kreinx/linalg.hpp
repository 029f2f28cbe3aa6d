#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include <Eigen/Dense>

namespace kreinx {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs(const CVector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

inline CMatrix hermitian_part(const CMatrix& m) {
  return (m + m.adjoint()) * 0.5;
}

/// max-entry distance to the conjugate transpose.
inline double hermitian_defect(const CMatrix& m) {
  return max_abs(CMatrix(m - m.adjoint()));
}

inline bool is_exactly_hermitian(const CMatrix& m) {
  if (m.rows() != m.cols()) return false;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = i; j < m.cols(); ++j)
      if (m(i, j) != std::conj(m(j, i))) return false;
  return true;
}

inline RVector singular_values(const CMatrix& m) {
  return Eigen::JacobiSVD<CMatrix>(m).singularValues();
}

inline double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

inline double min_singular_value(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  const RVector s = singular_values(m);
  return s(s.size() - 1);
}

inline bool is_real_point(Complex z) { return z.imag() == 0.0; }

inline std::string format_complex(Complex z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real();
  if (z.imag() != 0.0) os << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace kreinx
