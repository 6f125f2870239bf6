#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "ptspectra/matrix.hpp"

namespace testing {

using ptspectra::Complex;
using ptspectra::ComplexMatrix;

inline ComplexMatrix random_matrix(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = {u(rng), u(rng)};
  return a;
}

// Determinant by LU with partial pivoting, used as an oracle independent of
// the QR path.
inline Complex lu_determinant(ComplexMatrix a) {
  const std::size_t n = a.rows();
  Complex det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (a(piv, k) == Complex{}) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

// Product of values, accumulated as log-magnitude and phase to stay finite.
inline std::pair<double, double> log_product(const std::vector<Complex>& values) {
  double logmag = 0.0, phase = 0.0;
  for (const auto& v : values) {
    logmag += std::log(std::abs(v));
    phase += std::arg(v);
  }
  return {logmag, phase};
}

inline double residual(const ComplexMatrix& a, const std::vector<Complex>& v, Complex lambda) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex acc = -lambda * v[i];
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * v[j];
    s += std::norm(acc);
  }
  return std::sqrt(s);
}

// Eigenvalues of a 2x2 block by the quadratic formula.
inline std::pair<Complex, Complex> eig2(Complex a, Complex b, Complex c, Complex d) {
  const Complex tr = a + d, det = a * d - b * c;
  const Complex disc = std::sqrt(tr * tr - 4.0 * det);
  return {(tr - disc) / 2.0, (tr + disc) / 2.0};
}

}  // namespace testing
