#pragma once

// Seeded instance families shared by the verify command and the acceptance binary.

#include <cstdint>
#include <random>
#include <vector>

#include "svdpert/linalg.hpp"
#include "svdpert/oracle.hpp"
#include "svdpert/sintheta.hpp"
#include "svdpert/sylvester.hpp"

namespace svdpert::cli {

inline const std::vector<PairingNorm> kPairings = {
    PairingNorm::block_diag(NormKind::Spectral), PairingNorm::block_diag(NormKind::Frobenius),
    PairingNorm::block_diag(NormKind::Nuclear),  PairingNorm::max_of(NormKind::Spectral),
    PairingNorm::max_of(NormKind::Frobenius),    PairingNorm::max_of(NormKind::Nuclear)};

/// u diag(s) v^H with Haar-like random unitaries.
Matrix random_with_sv(const std::vector<double>& s, std::size_t rows, std::size_t cols,
                      std::mt19937_64& rng);

/// Coupled problem with every dimension in [1, max_dim]. Separated instances put
/// sv(A) in [1.2, 3) and sv(B) in [0, 1).
CoupledSylvesterProblem coupled_instance(std::uint64_t seed, std::size_t max_dim, bool separated);

/// Hermitian problem with eigenvalues of A in [1.2, 3) and of B in (-1, 1) when
/// separated, both in (-3, 3) otherwise.
HermSylvesterProblem herm_instance(std::uint64_t seed, std::size_t max_dim, bool separated);

/// min over sv(A) x sv_ext(B)
double spectral_gap(const CoupledSylvesterProblem& p);

PerturbationBlocks scaled(const PerturbationBlocks& b, double s);

/// Largest multiple s of the unit perturbation with kappa2 below `target` (bisection).
double scale_for_kappa(const oracle::Instance& unit, PairingNorm p, double target);

/// gen_instance scaled so that kappa2 sits just below `target` in pairing `p`.
oracle::Instance kappa_instance(oracle::InstanceSpec spec, PairingNorm p, double target);

/// (G, U~1, V~1, G~1) from the SVD of G + E, columns matched greedily to (U1, V1);
/// the complement (U2, V2) of G is supplied.
SinThetaInput sintheta_input(const oracle::Instance& inst);

}  // namespace svdpert::cli
