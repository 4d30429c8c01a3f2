#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svdpert/linalg.hpp"
#include "svdpert/matrix.hpp"

namespace svdpert {

/// Residual tolerance for every Sylvester-type solve, relative to the data scale.
inline constexpr double kTolSolve = 1e-10;

/// Smallest admissible spectral gap: 1e-8 * (||a||_2 + ||b||_2 + 1).
double gap_tolerance(const Matrix& a, const Matrix& b);

struct SpectralGap {
  double gap = 0.0;  // min |mu - nu|
  double mu = 0.0;
  double nu = 0.0;
};

/// min over mu in `a`, nu in `b` of |mu - nu| (exhaustive).
SpectralGap nearest_pair(const std::vector<double>& a, const std::vector<double>& b);

// ---------------------------------------------------------------------------
// X A - B X = S, A and B Hermitian

struct HermSylvesterProblem {
  Matrix a;      // r x r Hermitian
  Matrix b;      // s x s Hermitian
  Matrix s_rhs;  // s x r
};

/// Diagonalizes A and B once; solves for any number of right-hand sides.
class HermSylvesterSolver {
 public:
  /// Throws NotHermitianError, or SingularProblemError when the eigenvalue gap
  /// is below gap_tolerance(a, b).
  HermSylvesterSolver(const Matrix& a, const Matrix& b);

  Matrix solve(const Matrix& s) const;

  const std::vector<double>& eig_a() const { return ea_.lambda; }
  const std::vector<double>& eig_b() const { return eb_.lambda; }
  const SpectralGap& gap() const { return gap_; }

 private:
  EighResult ea_;
  EighResult eb_;
  SpectralGap gap_;
};

Matrix solve_herm_sylvester(const HermSylvesterProblem& p);

// ---------------------------------------------------------------------------
// X A - B Y = S,  Y A^H - B^H X = T

struct CoupledSylvesterProblem {
  Matrix a;      // r x r
  Matrix b;      // s x t
  Matrix s_rhs;  // s x r
  Matrix t_rhs;  // t x r
};

struct SolutionPair {
  Matrix x;  // s x r
  Matrix y;  // t x r
  double residual_1 = 0.0;  // ||X A - B Y - S||_F
  double residual_2 = 0.0;  // ||Y A^H - B^H X - T||_F
};

/// Zero-pads B to a square matrix of order max(s, t), together with the
/// right-hand side that gains rows. Solutions of the padded problem carry the
/// original solution in their leading rows and zeros below.
CoupledSylvesterProblem pad_to_square(const CoupledSylvesterProblem& p);

/// T(X, Y) = (X A - B Y, Y A^H - B^H X)
std::pair<Matrix, Matrix> coupled_operator(const Matrix& a, const Matrix& b, const Matrix& x,
                                           const Matrix& y);

/// Reusable solver for fixed (A, B): pads, merges into one Hermitian Sylvester
/// equation with Jordan-Wielandt coefficients, and diagonalizes those once.
class CoupledSylvesterSolver {
 public:
  CoupledSylvesterSolver(const Matrix& a, const Matrix& b);

  SolutionPair solve(const Matrix& s, const Matrix& t) const;

  /// min over sv(A) x sv_ext(B)
  const SpectralGap& gap() const { return gap_; }

 private:
  Matrix a_;
  Matrix b_;
  std::size_t order_;  // max(s, t)
  SpectralGap gap_;
  std::optional<HermSylvesterSolver> merged_;
};

SolutionPair solve_coupled(const CoupledSylvesterProblem& p);

// ---------------------------------------------------------------------------
// Bound certificates

enum class Regime { FrobeniusGap, IntervalSeparated, GeneralUI };

std::string_view to_string(Regime r);

struct BoundCertificate {
  std::string id;
  Regime regime = Regime::FrobeniusGap;
  PairingNorm norm;
  double delta = 0.0;
  double constant = 1.0;
  double bound_value = 0.0;
  double measured = 0.0;
  bool satisfied = false;
};

/// measured <= bound * (1 + 1e-10)
bool within_bound(double measured, double bound);

/// Certificates for every regime that applies to the coupled problem:
/// the Frobenius gap bound always; c = 1 bounds in all three norms and both
/// pairings when sigma_min(A) > sigma_max(B); the pi/2 and pi bounds always.
std::vector<BoundCertificate> coupled_bounds(const CoupledSylvesterProblem& p,
                                             const SolutionPair& sol);

/// Caller's claim that one spectrum lies in [alpha, beta] and the other
/// outside (alpha - delta, beta + delta). Verified before use.
struct IntervalSeparation {
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;
};

/// Davis-Kahan Frobenius bound, pi/2 bound in all three norms, and the c = 1
/// bound in all three norms when the spectra are interval separated (detected
/// when the spectra occupy disjoint intervals, or as claimed by `sep`).
std::vector<BoundCertificate> herm_bounds(const HermSylvesterProblem& p, const Matrix& x,
                                          std::optional<IntervalSeparation> sep = std::nullopt);

struct EqualityWitness {
  Matrix x;
  Matrix y;
  double delta = 0.0;  // sigma_min(A) - sigma_max(B)
  std::vector<std::pair<PairingNorm, double>> ratios;  // ||T(X,Y)|| / ||(X,Y)||
  /// Largest deviation of any ratio from delta.
  double worst_deviation = 0.0;
};

/// Rank-one pair attaining ||T(X,Y)|| = (sigma_min(A) - sigma_max(B)) ||(X,Y)||.
EqualityWitness equality_witness(const Matrix& a, const Matrix& b);

}  // namespace svdpert
