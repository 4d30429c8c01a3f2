#pragma once

#include <utility>
#include <vector>

#include "svdpert/linalg.hpp"
#include "svdpert/matrix.hpp"

namespace svdpert {

struct SubspacePair {
  Matrix basis_a;  // m x r, orthonormal columns
  Matrix basis_b;  // m x r, orthonormal columns
};

struct CanonicalAngles {
  std::vector<double> angles;   // nonincreasing, in [0, pi/2]
  std::vector<double> cosines;  // paired with angles
  std::vector<double> sines;    // from the complement of basis_a
  double route_defect = 0.0;    // max |cos^2 + sin^2 - 1|
};

/// Throws PreconditionError for non-orthonormal bases, VerificationError when the
/// cosine and sine routes disagree beyond 1e-10.
CanonicalAngles canonical_angles(const SubspacePair& p);

struct SinThetaInput {
  Matrix g;     // m x n
  Matrix u1_t;  // m x r
  Matrix v1_t;  // n x r
  Matrix g1_t;  // r x r
  // Complement of the unperturbed decomposition; derived from svd(g) when empty.
  Matrix u2;    // m x (m-r)
  Matrix v2;    // n x (n-r)
};

/// R = G V1t - U1t G1t,  S = G^H U1t - V1t G1t^H
std::pair<Matrix, Matrix> residuals(const SinThetaInput& inp);

struct SinThetaCertificate {
  NormKind norm = NormKind::Spectral;
  double delta = 0.0;  // min over sv(G1t) x sv_ext(G2)
  double c = 1.0;
  double lhs = 0.0;    // ||blkdiag(sin Theta_U, sin Theta_V)||
  double rhs_norm = 0.0;  // ||blkdiag(R, S)||
  double bound = 0.0;
  bool satisfied = false;
  CanonicalAngles angles_u;
  CanonicalAngles angles_v;
  double r_norm = 0.0;  // ||R||_F
  double s_norm = 0.0;  // ||S||_F
  /// max deviation of the sines from sv(U2^H U1t) and sv(V2^H V1t)
  double sin_identity_defect = 0.0;
};

/// Throws PreconditionError when delta <= 0, when the bases are not
/// orthonormal, or when supplied (u2, v2) do not block-diagonalize g.
SinThetaCertificate sin_theta_certificate(const SinThetaInput& inp, NormKind k);

}  // namespace svdpert
