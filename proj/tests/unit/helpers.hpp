#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "svdpert/matrix.hpp"
#include "svdpert/oracle.hpp"

namespace svdpert::testing {

inline Matrix mat(std::size_t rows, std::size_t cols, std::initializer_list<Complex> v) {
  return Matrix(rows, cols, std::vector<Complex>(v));
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return oracle::gaussian(rows, cols, rng);
}

inline Matrix random_hermitian(std::size_t n, std::uint64_t seed) {
  const Matrix a = random_matrix(n, n, seed);
  Matrix h = a + a.adjoint();
  h *= 0.5;
  return h;
}

/// Hermitian matrix with prescribed eigenvalues.
inline Matrix hermitian_with(const std::vector<double>& eig, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Matrix q = oracle::random_unitary(eig.size(), rng);
  return q * Matrix::diagonal(eig) * q.adjoint();
}

/// rows x cols matrix with prescribed singular values (length min(rows, cols)).
inline Matrix with_singular_values(const std::vector<double>& s, std::size_t rows,
                                   std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Matrix u = oracle::random_unitary(rows, rng);
  const Matrix v = oracle::random_unitary(cols, rng);
  return u * Matrix::diagonal(s, rows, cols) * v.adjoint();
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace svdpert::testing
