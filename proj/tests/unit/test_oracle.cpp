#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "svdpert/errors.hpp"
#include "svdpert/linalg.hpp"
#include "svdpert/oracle.hpp"

using namespace svdpert;
using namespace svdpert::oracle;
using svdpert::testing::mat;
using svdpert::testing::random_matrix;

TEST(RandomUnitary, IsUnitaryAndDeterministic) {
  std::mt19937_64 a(9), b(9);
  const Matrix q = random_unitary(7, a);
  EXPECT_LE(orthonormality_defect(q), 1e-13);
  EXPECT_EQ(q, random_unitary(7, b));
}

TEST(GenInstance, ZeroScaleGivesZeroBlocks) {
  const Instance inst = gen_instance({6, 5, 2, GapProfile::interval(1.0), 0.0, 3});
  EXPECT_EQ(inst.e.max_abs(), 0.0);
  EXPECT_EQ(inst.eb.e11.max_abs(), 0.0);
  EXPECT_EQ(inst.eb.e22.max_abs(), 0.0);
}

TEST(GenInstance, Deterministic) {
  const InstanceSpec spec{6, 5, 2, GapProfile::interleaved(0.2), 0.3, 11};
  const Instance a = gen_instance(spec);
  const Instance b = gen_instance(spec);
  EXPECT_EQ(a.ctx.g, b.ctx.g);
  EXPECT_EQ(a.e, b.e);
  EXPECT_EQ(a.sv_g1, b.sv_g1);
}

TEST(GenInstance, IntervalGapExact) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = gen_instance({7, 6, 3, GapProfile::interval(1.0), 0.1, seed});
    EXPECT_EQ(inst.sv_g1.back() - inst.sv_g2.front(), 1.0);
    EXPECT_NEAR(inst.e.frobenius_norm(), 0.1, 1e-15);
    const std::vector<double> s1 = singular_values(inst.ctx.g1);
    const std::vector<double> s2 = singular_values(inst.ctx.g2);
    EXPECT_NEAR(s1.back() - s2.front(), 1.0, 1e-12);
    // G carries the prescribed spectrum
    std::vector<double> all = inst.sv_g1;
    all.insert(all.end(), inst.sv_g2.begin(), inst.sv_g2.end());
    std::sort(all.rbegin(), all.rend());
    EXPECT_LE(svdpert::testing::max_abs_diff(singular_values(inst.ctx.g), all), 1e-12);
  }
}

TEST(GenInstance, InterleavedRespectsMinGap) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = gen_instance({6, 4, 2, GapProfile::interleaved(0.25), 0.0, seed});
    EXPECT_LE(inst.sv_g1.back(), inst.sv_g2.front());
    for (double mu : inst.sv_g1) {
      EXPECT_GE(mu, 0.25);  // extended zero of the 4x2 G2
      for (double nu : inst.sv_g2) EXPECT_GE(std::abs(mu - nu), 0.25);
    }
  }
}

TEST(GenInstance, Rejections) {
  EXPECT_THROW(gen_instance({4, 3, 0, GapProfile::interval(1.0), 0.0, 1}), PreconditionError);
  EXPECT_THROW(gen_instance({4, 3, 3, GapProfile::interval(1.0), 0.0, 1}), PreconditionError);
  EXPECT_THROW(gen_instance({4, 3, 1, GapProfile::interval(1.0), -1.0, 1}), PreconditionError);
  EXPECT_THROW(gen_instance({4, 3, 1, GapProfile::interleaved(2.0), 0.0, 1}), PreconditionError);
}

TEST(GenOffdiag, SpectralNormsMatchTarget) {
  const Instance inst = gen_offdiag_instance(8, 7, 3, 1.0, 0.1, 5);
  EXPECT_NEAR(ui_norm(inst.eb.e12, NormKind::Spectral), 0.1, 1e-12);
  EXPECT_NEAR(ui_norm(inst.eb.e21, NormKind::Spectral), 0.1, 1e-12);
  EXPECT_LE(inst.eb.e11.max_abs(), 1e-14);
  EXPECT_LE(inst.eb.e22.max_abs(), 1e-14);
}

TEST(Vectorized, ScalarAndZero) {
  const VectorizedPair p =
      vectorized_coupled_solve(mat(1, 1, {2}), mat(1, 1, {0.5}), mat(1, 1, {1}), mat(1, 1, {0}));
  EXPECT_NEAR(p.x(0, 0).real(), 8.0 / 15.0, 1e-15);
  EXPECT_NEAR(p.y(0, 0).real(), 2.0 / 15.0, 1e-15);
  EXPECT_LE(std::max(p.residual_1, p.residual_2), 1e-15);

  const VectorizedPair z = vectorized_coupled_solve(random_matrix(2, 2, 1) + mat(2, 2, {4, 0, 0, 4}),
                                                    random_matrix(3, 2, 2) * 0.1, Matrix(3, 2),
                                                    Matrix(2, 2));
  EXPECT_EQ(z.x.max_abs(), 0.0);
  EXPECT_EQ(z.y.max_abs(), 0.0);
}

TEST(Vectorized, SingularRejected) {
  EXPECT_THROW(vectorized_coupled_solve(mat(1, 1, {1}), mat(1, 1, {1}), mat(1, 1, {1}),
                                        mat(1, 1, {1})),
               PreconditionError);
  EXPECT_THROW(vectorized_herm_solve(mat(1, 1, {1}), mat(1, 1, {1}), mat(1, 1, {1})),
               PreconditionError);
}

TEST(Vectorized, HermScalar) {
  const Matrix x = vectorized_herm_solve(mat(1, 1, {2}), mat(1, 1, {0}), mat(1, 1, {1}));
  EXPECT_NEAR(x(0, 0).real(), 0.5, 1e-15);
}

TEST(GreedyMatch, PicksPerturbedTopBlock) {
  const Instance inst = gen_instance({6, 5, 2, GapProfile::interval(1.0), 1e-3, 21});
  const SvdResult s = svd(inst.ctx.g + inst.e);
  const auto idx = greedy_match(inst.ctx.u1(), inst.ctx.v1(), s.u, s.v, 2);
  EXPECT_EQ(idx, (std::vector<std::size_t>{0, 1}));
}

TEST(RotationOracle, ZeroPerturbation) {
  const Instance inst = gen_instance({6, 5, 2, GapProfile::interval(1.0), 0.0, 2});
  const auto rot = direct_rotation_oracle(inst.ctx, inst.e);
  ASSERT_TRUE(rot.has_value());
  EXPECT_LE(rot->gamma.frobenius_norm(), 1e-12);
  EXPECT_LE(rot->omega.frobenius_norm(), 1e-12);
}

TEST(RotationOracle, ResidualsSmall) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Instance inst = gen_instance({7, 5, 2, GapProfile::interval(1.0), 0.05, seed});
    const auto rot = direct_rotation_oracle(inst.ctx, inst.e);
    ASSERT_TRUE(rot.has_value());
    EXPECT_LE(std::max(rot->residual_1, rot->residual_2), 1e-9) << seed;
  }
}
