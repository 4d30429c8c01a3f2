#pragma once

// Brute-force references and seeded instance generators. Deliberately built on
// core linear algebra only, never on the Sylvester or perturbation solvers.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "svdpert/blocks.hpp"
#include "svdpert/matrix.hpp"

namespace svdpert::oracle {

/// Anchor of the interval-separated profile: sigma_max(G2) = gap_anchor.
inline constexpr double kGapAnchor = 1.0;

struct GapProfile {
  enum class Kind { IntervalSeparated, Interleaved };
  Kind kind = Kind::IntervalSeparated;
  double value = 1.0;  // width, or min_gap

  static GapProfile interval(double width) { return {Kind::IntervalSeparated, width}; }
  static GapProfile interleaved(double min_gap) { return {Kind::Interleaved, min_gap}; }
};

struct InstanceSpec {
  std::size_t m = 4;
  std::size_t n = 3;
  std::size_t r = 1;
  GapProfile gap;
  double pert_scale = 0.0;
  std::uint64_t seed = 0;
};

struct Instance {
  BlockContext ctx;
  PerturbationBlocks eb;
  Matrix e;
  std::vector<double> sv_g1;  // prescribed, nonincreasing
  std::vector<double> sv_g2;  // prescribed, nonincreasing, length min(m-r, n-r)
};

/// Entries with independent standard normal real and imaginary parts.
Matrix gaussian(std::size_t rows, std::size_t cols, std::mt19937_64& rng);

/// Product of n Householder reflectors built from Gaussian vectors.
Matrix random_unitary(std::size_t n, std::mt19937_64& rng);

/// Deterministic per seed. Throws PreconditionError for an invalid or infeasible spec.
Instance gen_instance(const InstanceSpec& spec);

/// Interval-separated instance with E11 = E22 = 0 and ||E12||_2 = ||E21||_2 = ratio * width.
Instance gen_offdiag_instance(std::size_t m, std::size_t n, std::size_t r, double width,
                              double ratio, std::uint64_t seed);

/// U^H E V cut at r, computed entrywise.
PerturbationBlocks blocks_of(const Matrix& u, const Matrix& v, const Matrix& e, std::size_t r);

struct VectorizedPair {
  Matrix x;
  Matrix y;
  double residual_1 = 0.0;
  double residual_2 = 0.0;
};

/// X A - B Y = S, Y A^H - B^H X = T as one real linear system, Gaussian
/// elimination with partial pivoting. Throws PreconditionError when singular.
VectorizedPair vectorized_coupled_solve(const Matrix& a, const Matrix& b, const Matrix& s,
                                        const Matrix& t);

/// X A - B X = S by the same dense route.
Matrix vectorized_herm_solve(const Matrix& a, const Matrix& b, const Matrix& s);

/// Indices j < min(m, n) of the r columns of (ut, vt) nearest to range(u1), range(v1),
/// picked greedily by ||u1^H ut_j||^2 + ||v1^H vt_j||^2.
std::vector<std::size_t> greedy_match(const Matrix& u1, const Matrix& v1, const Matrix& ut,
                                      const Matrix& vt, std::size_t r);

struct RotationOracle {
  Matrix gamma;
  Matrix omega;
  std::vector<std::size_t> selected;
  double cond = 0.0;  // max of cond(U1^H U1t), cond(V1^H V1t)
  double residual_1 = 0.0;
  double residual_2 = 0.0;
};

/// Gamma = (U2^H U1t)(U1^H U1t)^{-1}, Omega likewise, from the full SVD of G + E.
/// Abstains (nullopt) when either inverted block has condition number above 1e8.
std::optional<RotationOracle> direct_rotation_oracle(const BlockContext& ctx, const Matrix& e);

}  // namespace svdpert::oracle
