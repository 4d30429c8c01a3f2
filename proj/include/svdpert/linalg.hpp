#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "svdpert/matrix.hpp"

namespace svdpert {

namespace tol {
inline constexpr double recon = 1e-10;
inline constexpr int max_sweeps = 60;
/// Jacobi rotation threshold on the normalized off-diagonal coupling.
inline constexpr double jacobi = 1e-14;
inline double unitary(std::size_t n) { return 1e-10 * static_cast<double>(n); }
inline double herm(double frobenius) { return 1e-12 * frobenius; }
}  // namespace tol

/// Singular values of an m x n matrix, with |m - n| extra zeros carried implicitly.
struct SingularSpectrum {
  std::vector<double> values;  // nonincreasing, length min(m, n)
  std::size_t ext_zeros = 0;   // |m - n|

  double max() const { return values.empty() ? 0.0 : values.front(); }
  double min() const { return values.empty() ? 0.0 : values.back(); }
  /// values followed by ext_zeros zeros (the extended multiset, still nonincreasing).
  std::vector<double> extended() const;
};

struct SvdResult {
  Matrix u;  // m x m unitary
  SingularSpectrum sigma;
  Matrix v;  // n x n unitary
  int sweeps = 0;
};

/// Full SVD a = u * diag(sigma) * v^H by one-sided cyclic Jacobi.
/// Throws ConvergenceError after tol::max_sweeps sweeps.
SvdResult svd(const Matrix& a);

/// Nonincreasing singular values only.
std::vector<double> singular_values(const Matrix& a);

struct EighResult {
  Matrix q;                   // unitary, columns are eigenvectors
  std::vector<double> lambda; // nonincreasing
  int sweeps = 0;
};

/// Hermitian eigendecomposition h = q * diag(lambda) * q^H by two-sided complex Jacobi.
/// Throws NotHermitianError when h deviates from Hermitian by more than tol::herm.
EighResult eigh(const Matrix& h);

enum class NormKind { Spectral, Frobenius, Nuclear };

inline constexpr NormKind kAllNorms[] = {NormKind::Spectral, NormKind::Frobenius,
                                         NormKind::Nuclear};

std::string_view to_string(NormKind k);
NormKind parse_norm_kind(std::string_view s);

/// Norm on pairs (X, Y): either the UI norm of blkdiag(X, Y) or max of the two UI norms.
struct PairingNorm {
  enum class Kind { BlockDiag, MaxOf };
  Kind kind = Kind::BlockDiag;
  NormKind norm = NormKind::Spectral;

  static constexpr PairingNorm block_diag(NormKind k) { return {Kind::BlockDiag, k}; }
  static constexpr PairingNorm max_of(NormKind k) { return {Kind::MaxOf, k}; }

  friend bool operator==(const PairingNorm&, const PairingNorm&) = default;
};

std::string_view to_string(PairingNorm::Kind k);
PairingNorm::Kind parse_pairing_kind(std::string_view s);
/// e.g. "blockdiag(spectral)"
std::string describe(PairingNorm p);

double ui_norm(const Matrix& a, NormKind k);
double ui_norm_from_values(const std::vector<double>& sigma, NormKind k);
double pair_norm(const Matrix& g, const Matrix& w, PairingNorm p);

/// (I + g^H g)^{-1/2}, via eigh of the Gram matrix.
Matrix inv_sqrt_gram(const Matrix& g);
/// (I + g^H g)^{1/2}
Matrix sqrt_gram(const Matrix& g);

SingularSpectrum sv_ext(const Matrix& a);

/// ||q^H q - I||_F; zero for a matrix with orthonormal columns.
double orthonormality_defect(const Matrix& q);
/// max |h(i,j) - conj(h(j,i))|
double hermitian_defect(const Matrix& h);

struct InterlaceReport {
  std::size_t r = 0;
  double sigma_r = 0.0;
  double sigma_r1 = 0.0;
  double smin_cols = 0.0;     // sigma_min(B(:, 1:r))
  double smin_rows = 0.0;     // sigma_min(B(1:r, :))
  double smin_lead = 0.0;     // sigma_min(B(1:r, 1:r))
  double smax_tail_cols = 0.0;  // sigma_max(B(:, r+1:n))
  double smax_tail_rows = 0.0;  // sigma_max(B(r+1:m, :))
  bool sigma_r_ge_blocks = false;
  bool blocks_ge_lead = false;
  bool sigma_r1_le_cols = false;
  bool sigma_r1_le_rows = false;

  bool all() const {
    return sigma_r_ge_blocks && blocks_ge_lead && sigma_r1_le_cols && sigma_r1_le_rows;
  }
};

/// Singular-value interlacing against leading/trailing blocks, 1 <= r < min(m, n).
/// Comparisons carry an absolute slack of 1e-12 * ||b||_2 for roundoff.
InterlaceReport interlace_check(const Matrix& b, std::size_t r);

/// q * diag(f(lambda)) * q^H for a computed Hermitian eigendecomposition.
template <typename F>
Matrix hermitian_function(const EighResult& e, F&& f) {
  const std::size_t n = e.q.rows();
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(e.lambda[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex qik = e.q(i, k) * fk;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += qik * std::conj(e.q(j, k));
    }
  }
  return out;
}

}  // namespace svdpert
