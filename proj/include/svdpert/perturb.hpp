#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "svdpert/blocks.hpp"
#include "svdpert/linalg.hpp"
#include "svdpert/matrix.hpp"

namespace svdpert {

inline constexpr double kTolFixedPoint = 1e-13;
inline constexpr int kMaxFixedPointIters = 200;

enum class Separation { IntervalSeparated, DisjointOnly };

std::string_view to_string(Separation s);

/// Rejects u, v that are not unitary, r outside [1, min(m,n)), or u^H g v whose
/// off-diagonal blocks exceed 1e-12 * ||g||_F.
BlockContext split_context(const Matrix& g, const Matrix& u, const Matrix& v, std::size_t r);

/// split_context with u, v taken from the SVD of g.
BlockContext split_context_svd(const Matrix& g, std::size_t r);

PerturbationBlocks project_perturbation(const BlockContext& ctx, const Matrix& e);

struct GapReport {
  double delta = 0.0;        // min |mu - nu|, mu in sv(G1), nu in sv_ext(G2)
  double delta_under = 0.0;  // delta - ||E11||_2 - ||E22||_2
  double epsilon = 0.0;      // max(||E12||_2, ||E21||_2)
  double g_norm = 0.0;       // ||(E21, E12^H)|| in `pairing`
  double kappa2 = 0.0;       // c^2 eps g_norm / delta_under^2, +inf when delta_under <= 0
  double c = 1.0;
  Separation separation = Separation::DisjointOnly;
  PairingNorm pairing;
  bool condition_met = false;

  double e11_norm = 0.0;
  double e22_norm = 0.0;
  double sigma_min_g1 = 0.0;
  double sigma_max_g2 = 0.0;
};

double constant_c(Separation s, PairingNorm p);

GapReport gap_quantities(const BlockContext& ctx, const PerturbationBlocks& eb, PairingNorm p);

/// T(Gamma, Omega) with A = G1 + E11 and B = G2 + E22.
std::pair<Matrix, Matrix> apply_T(const BlockContext& ctx, const PerturbationBlocks& eb,
                                  const Matrix& gamma, const Matrix& omega);

/// phi(Gamma, Omega) = (Gamma E12 Omega, Omega E21^H Gamma)
std::pair<Matrix, Matrix> apply_phi(const PerturbationBlocks& eb, const Matrix& gamma,
                                    const Matrix& omega);

struct RotationPair {
  Matrix gamma;  // (m-r) x r
  Matrix omega;  // (n-r) x r
  int iterations = 0;
  double final_step_norm = 0.0;
  double residual_1 = 0.0;
  double residual_2 = 0.0;
  double pair_norm = 0.0;   // ||(Gamma, Omega)|| in the report's pairing
  bool guaranteed = true;   // false when run with force and the condition fails
};

/// Successive substitution x_{k+1} = T^{-1}((E21, E12^H) - phi(x_k)) from x_0 = 0.
/// Throws PreconditionError when the gap condition fails and `force` is false,
/// ConvergenceError after kMaxFixedPointIters, VerificationError when the
/// residuals of the quadratic system exceed the solve tolerance.
RotationPair solve_rotations(const BlockContext& ctx, const PerturbationBlocks& eb,
                             const GapReport& rep, bool force = false);

/// (1 + sqrt(1 - 4k)) / (1 - 2k + sqrt(1 - 4k)), for 0 <= k <= 1/4.
double rotation_factor(double kappa);

/// factor(kappa2) * c * g_norm / delta_under. Requires rep.condition_met.
double rotation_bound(const GapReport& rep);

struct CorrectedDecomposition {
  Matrix u_check;
  Matrix v_check;
  Matrix g1_check;  // U1c^H G~ V1c
  Matrix g2_check;  // U2c^H G~ V2c
  double offdiag_residual = 0.0;
  double closed_form_defect = 0.0;  // worst of the four closed forms, relative to ||G~||_F
  double multiset_defect = 0.0;     // sv(G~) vs sv(G1c) u sv(G2c), absolute
  double multiset_tol = 0.0;

  double bound_pair_norm = 0.0;  // rotation_bound, NaN when the condition fails
  double sigma_min_g1_lower = 0.0;
  double sigma_max_g2_upper = 0.0;
  double sigma_min_g1 = 0.0;  // measured sigma_min(G1c)
  double sigma_max_g2 = 0.0;  // measured sigma_max(G2c)

  // indexed like kAllNorms
  std::array<double, 3> u1_dist{};
  std::array<double, 3> v1_dist{};
  std::array<double, 3> gamma_norm{};
  std::array<double, 3> omega_norm{};
  double u1_footnote = 0.0;  // closed-form spectral distance from ||Gamma||_2
  double v1_footnote = 0.0;
  bool distances_certified = false;
};

/// sqrt(2) g / [sqrt(1+g^2) (sqrt(1+g^2)+1)]^{1/2}
double footnote_distance(double gamma_2);

/// Throws VerificationError when the corrected unitaries are not unitary, when
/// the closed forms disagree beyond 1e-10 relative, or when the singular-value
/// multiset identity fails.
CorrectedDecomposition build_corrected(const BlockContext& ctx, const PerturbationBlocks& eb,
                                       const RotationPair& rot, const GapReport& rep);

struct CorollaryEntry {
  std::string id;
  PairingNorm measured_in;  // norm of (Gamma, Omega) that the bound controls
  bool condition_met = false;
  double kappa = 0.0;
  double bound = 0.0;  // NaN when the condition fails
};

struct ComparisonReport {
  double eps_hat = 0.0;    // sqrt(||E12||_F^2 + ||E21||_F^2)
  double eps_tilde = 0.0;  // sqrt(min(m-r, n-r, r)) sqrt(||E12||_2^2 + ||E21||_2^2)
  double epsilon = 0.0;
  double delta_under = 0.0;
  bool stewart_condition_met = false;
  double stewart_bound = 0.0;
  bool naive_condition_met = false;
  double naive_bound = 0.0;
  /// stewart, naive_spectral, cor.F1, cor.F2, cor.sp1, cor.sp2
  std::vector<CorollaryEntry> entries;

  const CorollaryEntry& entry(std::string_view id) const;
};

ComparisonReport corollary_suite(const BlockContext& ctx, const PerturbationBlocks& eb);

struct ImprovedSigmaBounds {
  double lower = 0.0;
  double upper = 0.0;
  double measured = 0.0;  // sigma_min(G1c)
  double term = 0.0;      // 2 eps^2 / (du + sqrt(du^2 + 4 eps^2))
  double slack_tol = 0.0;
  bool in_interval = false;
  bool blocks_separated = false;  // sigma_min(G1c) > sigma_max(G2c)
  double top_r_defect = 0.0;
  bool top_r_match = false;
  double per_index_worst = 0.0;  // max_i |s_i(G1c) - s_i(G1+E11)| - term
  bool per_index_ok = false;

  bool all() const { return in_interval && blocks_separated && top_r_match && per_index_ok; }
};

/// Requires interval separation and a met condition with c = 1.
ImprovedSigmaBounds improved_sigma_bounds(const BlockContext& ctx, const PerturbationBlocks& eb,
                                          const CorrectedDecomposition& cd, const GapReport& rep);

}  // namespace svdpert
