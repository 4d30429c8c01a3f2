#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "svdpert/errors.hpp"
#include "svdpert/oracle.hpp"
#include "svdpert/sylvester.hpp"

using namespace svdpert;
using svdpert::testing::hermitian_with;
using svdpert::testing::mat;
using svdpert::testing::random_matrix;
using svdpert::testing::with_singular_values;

namespace {

double rel_diff(const Matrix& a, const Matrix& b) {
  return (a - b).frobenius_norm() / std::max(1.0, b.frobenius_norm());
}

bool has_id(const std::vector<BoundCertificate>& c, const std::string& id) {
  for (const auto& x : c) {
    if (x.id == id) return true;
  }
  return false;
}

// A with singular values in [lo_a, lo_a + 2], B with singular values in [0, hi_b]
CoupledSylvesterProblem separated_problem(std::size_t r, std::size_t s, std::size_t t,
                                          double lo_a, double hi_b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(lo_a, lo_a + 2.0);
  std::uniform_real_distribution<double> ub(0.0, hi_b);
  std::vector<double> sa(r), sb(std::min(s, t));
  for (auto& x : sa) x = ua(rng);
  for (auto& x : sb) x = ub(rng);
  std::sort(sa.rbegin(), sa.rend());
  std::sort(sb.rbegin(), sb.rend());
  CoupledSylvesterProblem p;
  p.a = with_singular_values(sa, r, r, seed + 1);
  p.b = with_singular_values(sb, s, t, seed + 2);
  p.s_rhs = random_matrix(s, r, seed + 3);
  p.t_rhs = random_matrix(t, r, seed + 4);
  return p;
}

}  // namespace

TEST(HermSylvester, ScalarExamples) {
  const Matrix x = solve_herm_sylvester({mat(1, 1, {2}), mat(1, 1, {0}), mat(1, 1, {1})});
  EXPECT_NEAR(x(0, 0).real(), 0.5, 1e-15);

  const Matrix y =
      solve_herm_sylvester({mat(2, 2, {3, 0, 0, 1}), mat(1, 1, {0}), mat(1, 2, {1, 1})});
  EXPECT_NEAR(y(0, 0).real(), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(y(0, 1).real(), 1.0, 1e-15);
}

TEST(HermSylvester, SingularReportsNearestPair) {
  try {
    solve_herm_sylvester({mat(1, 1, {1}), mat(2, 2, {1, 0, 0, 3}), mat(2, 1, {1, 1})});
    FAIL() << "expected SingularProblemError";
  } catch (const SingularProblemError& e) {
    EXPECT_DOUBLE_EQ(e.mu, 1.0);
    EXPECT_DOUBLE_EQ(e.nu, 1.0);
    EXPECT_EQ(e.gap, 0.0);
  }
}

TEST(HermSylvester, MatchesVectorizedOracle) {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    // eigenvalues of a in [2.5, 4], of b in [-2, 2], gap >= 0.5
    std::uniform_real_distribution<double> ua(2.5, 4.0), ub(-2.0, 2.0);
    std::vector<double> ea(4), eb(3);
    for (auto& v : ea) v = ua(rng);
    for (auto& v : eb) v = ub(rng);
    HermSylvesterProblem p{hermitian_with(ea, seed), hermitian_with(eb, seed + 99),
                           random_matrix(3, 4, seed + 7)};
    const Matrix x = solve_herm_sylvester(p);
    const Matrix ref = oracle::vectorized_herm_solve(p.a, p.b, p.s_rhs);
    ASSERT_LE(rel_diff(x, ref), 1e-10);
  }
}

TEST(HermSylvester, BoundsHold) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> ea(3), eb(4);
    for (auto& v : ea) v = u(rng);
    for (auto& v : eb) v = u(rng);
    HermSylvesterProblem p{hermitian_with(ea, seed + 1), hermitian_with(eb, seed + 2),
                           random_matrix(4, 3, seed + 3)};
    Matrix x;
    try {
      x = solve_herm_sylvester(p);
    } catch (const SingularProblemError&) {
      continue;
    }
    const auto certs = herm_bounds(p, x);
    EXPECT_TRUE(has_id(certs, "dk.frobenius"));
    EXPECT_TRUE(has_id(certs, "bdm.nuclear"));
    for (const auto& c : certs) ASSERT_TRUE(c.satisfied) << c.id << " seed " << seed;
  }
}

TEST(HermSylvester, ClaimedIntervalSeparation) {
  // eig(a) in [-1, 1], eig(b) outside (-2, 2)
  HermSylvesterProblem p{hermitian_with({0.9, -0.9}, 3), hermitian_with({2.5, -3.0}, 4),
                         random_matrix(2, 2, 5)};
  const Matrix x = solve_herm_sylvester(p);
  const auto certs = herm_bounds(p, x, IntervalSeparation{-1.0, 1.0, 1.0});
  EXPECT_TRUE(has_id(certs, "dk.spectral"));
  for (const auto& c : certs) EXPECT_TRUE(c.satisfied) << c.id;

  EXPECT_THROW(herm_bounds(p, x, IntervalSeparation{-1.0, 1.0, 2.0}), PreconditionError);
}

TEST(PadToSquare, Shapes) {
  CoupledSylvesterProblem sq{random_matrix(2, 2, 1), random_matrix(3, 3, 2),
                             random_matrix(3, 2, 3), random_matrix(3, 2, 4)};
  const auto same = pad_to_square(sq);
  EXPECT_EQ(same.b, sq.b);
  EXPECT_EQ(same.s_rhs, sq.s_rhs);
  EXPECT_EQ(same.t_rhs, sq.t_rhs);

  CoupledSylvesterProblem tall{random_matrix(2, 2, 1), random_matrix(3, 2, 2),
                               random_matrix(3, 2, 3), random_matrix(2, 2, 4)};
  const auto pt = pad_to_square(tall);
  ASSERT_EQ(pt.b.rows(), 3u);
  ASSERT_EQ(pt.b.cols(), 3u);
  EXPECT_EQ(pt.b.block(0, 0, 3, 2), tall.b);
  EXPECT_EQ(pt.b.block(0, 2, 3, 1).max_abs(), 0.0);
  ASSERT_EQ(pt.t_rhs.rows(), 3u);
  EXPECT_EQ(pt.t_rhs.block(2, 0, 1, 2).max_abs(), 0.0);
  EXPECT_EQ(pt.s_rhs, tall.s_rhs);

  CoupledSylvesterProblem wide{random_matrix(2, 2, 1), random_matrix(2, 3, 2),
                               random_matrix(2, 2, 3), random_matrix(3, 2, 4)};
  const auto pw = pad_to_square(wide);
  ASSERT_EQ(pw.b.rows(), 3u);
  EXPECT_EQ(pw.b.block(0, 0, 2, 3), wide.b);
  EXPECT_EQ(pw.b.block(2, 0, 1, 3).max_abs(), 0.0);
  ASSERT_EQ(pw.s_rhs.rows(), 3u);
  EXPECT_EQ(pw.s_rhs.block(2, 0, 1, 2).max_abs(), 0.0);
}

TEST(Coupled, ScalarExample) {
  const SolutionPair sol =
      solve_coupled({mat(1, 1, {2}), mat(1, 1, {0.5}), mat(1, 1, {1}), mat(1, 1, {0})});
  EXPECT_NEAR(sol.x(0, 0).real(), 8.0 / 15.0, 1e-15);
  EXPECT_NEAR(sol.y(0, 0).real(), 2.0 / 15.0, 1e-15);

  const auto certs = coupled_bounds(
      {mat(1, 1, {2}), mat(1, 1, {0.5}), mat(1, 1, {1}), mat(1, 1, {0})}, sol);
  ASSERT_FALSE(certs.empty());
  EXPECT_EQ(certs[0].id, "a.frobenius");
  EXPECT_NEAR(certs[0].delta, 1.5, 1e-15);
  EXPECT_NEAR(certs[0].bound_value, 1.0 / 1.5, 1e-15);
  EXPECT_NEAR(certs[0].measured, std::hypot(8.0, 2.0) / 15.0, 1e-15);
  EXPECT_TRUE(certs[0].satisfied);
}

TEST(Coupled, ZeroRhs) {
  const SolutionPair sol = solve_coupled(
      {random_matrix(2, 2, 1) + mat(2, 2, {5, 0, 0, 5}), random_matrix(3, 2, 2) * 0.1,
       Matrix(3, 2), Matrix(2, 2)});
  EXPECT_EQ(sol.x.max_abs(), 0.0);
  EXPECT_EQ(sol.y.max_abs(), 0.0);
}

TEST(Coupled, MatchesVectorizedOracle) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::size_t> dim(1, 5);
  int solved = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const std::size_t r = dim(rng), s = dim(rng), t = dim(rng);
    CoupledSylvesterProblem p{random_matrix(r, r, seed), random_matrix(s, t, seed + 1),
                              random_matrix(s, r, seed + 2), random_matrix(t, r, seed + 3)};
    const std::vector<double> sa = singular_values(p.a);
    const std::vector<double> sb = sv_ext(p.b).extended();
    if (nearest_pair(sa, sb).gap < 0.1) continue;
    const SolutionPair sol = solve_coupled(p);
    const auto ref = oracle::vectorized_coupled_solve(p.a, p.b, p.s_rhs, p.t_rhs);
    const double scale = std::max(1.0, std::hypot(ref.x.frobenius_norm(), ref.y.frobenius_norm()));
    const double err = std::hypot((sol.x - ref.x).frobenius_norm(), (sol.y - ref.y).frobenius_norm());
    ASSERT_LE(err / scale, 1e-9) << "seed " << seed;
    ++solved;
  }
  EXPECT_GT(solved, 300);
}

TEST(Coupled, SquareUnchangedByPadding) {
  CoupledSylvesterProblem p = separated_problem(2, 3, 3, 3.0, 1.0, 9);
  const SolutionPair a = solve_coupled(p);
  const SolutionPair b = solve_coupled(pad_to_square(p));
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
}

TEST(Coupled, SingularRejected) {
  // sigma(A) = 1 and B = [1]
  EXPECT_THROW(
      solve_coupled({mat(1, 1, {1}), mat(1, 1, {1}), mat(1, 1, {1}), mat(1, 1, {1})}),
      SingularProblemError);
  // extended zero of a 2x1 B collides with a zero singular value of A
  EXPECT_THROW(solve_coupled({mat(1, 1, {0}), mat(2, 1, {3, 0}), mat(2, 1, {1, 1}),
                              mat(1, 1, {1})}),
               SingularProblemError);
}

TEST(CoupledBounds, SeparatedEmitsAllRegimes) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const CoupledSylvesterProblem p = separated_problem(3, 4, 2, 2.0, 1.0, seed * 10);
    const auto certs = coupled_bounds(p, solve_coupled(p));
    for (const char* id : {"a.frobenius", "b.blockdiag.nuclear", "b.max.frobenius",
                           "b.spectral", "c.max.spectral", "c.spectral"}) {
      EXPECT_TRUE(has_id(certs, id)) << id;
    }
    for (const auto& c : certs) {
      ASSERT_TRUE(c.satisfied) << c.id;
      if (c.regime == Regime::IntervalSeparated) ASSERT_EQ(c.constant, 1.0);
    }
  }
}

TEST(CoupledBounds, InterleavedSkipsRegimeB) {
  CoupledSylvesterProblem p{with_singular_values({3.0, 1.0}, 2, 2, 1),
                            with_singular_values({2.0}, 1, 1, 2), random_matrix(1, 2, 3),
                            random_matrix(1, 2, 4)};
  const auto certs = coupled_bounds(p, solve_coupled(p));
  for (const auto& c : certs) {
    EXPECT_NE(c.regime, Regime::IntervalSeparated) << c.id;
    EXPECT_TRUE(c.satisfied) << c.id;
  }
  EXPECT_TRUE(has_id(certs, "c.blockdiag.spectral"));
  EXPECT_TRUE(has_id(certs, "a.frobenius"));
}

TEST(CoupledBounds, SpectralPairingsCoincide) {
  const CoupledSylvesterProblem p = separated_problem(2, 3, 4, 2.0, 1.0, 77);
  const auto certs = coupled_bounds(p, solve_coupled(p));
  double bd = -1, mx = -2;
  for (const auto& c : certs) {
    if (c.id == "b.blockdiag.spectral") bd = c.measured;
    if (c.id == "b.max.spectral") mx = c.measured;
  }
  EXPECT_NEAR(bd, mx, 1e-14);
}

TEST(Witness, Examples) {
  const EqualityWitness w = equality_witness(mat(1, 1, {3}), mat(1, 1, {1}));
  EXPECT_NEAR(w.delta, 2.0, 1e-15);
  EXPECT_EQ(w.ratios.size(), 6u);
  for (const auto& [p, ratio] : w.ratios) EXPECT_NEAR(ratio, 2.0, 1e-10) << describe(p);

  // sigma_min(A) - sigma_max(B) = 4 - 2
  const EqualityWitness v = equality_witness(mat(2, 2, {5, 0, 0, 4}), mat(2, 2, {2, 0, 0, 1}));
  EXPECT_NEAR(v.delta, 2.0, 1e-14);
  for (const auto& [p, ratio] : v.ratios) EXPECT_NEAR(ratio, 2.0, 1e-10) << describe(p);
  EXPECT_LE(v.worst_deviation, 1e-10);

  EXPECT_THROW(equality_witness(mat(1, 1, {1}), mat(1, 1, {2})), PreconditionError);
}

TEST(Witness, RandomSeparated) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const CoupledSylvesterProblem p = separated_problem(1 + seed % 4, 1 + seed % 3,
                                                        1 + seed % 5, 2.0, 1.5, seed);
    const EqualityWitness w = equality_witness(p.a, p.b);
    ASSERT_LE(w.worst_deviation, 1e-10) << seed;
  }
}

TEST(WithinBound, RelativeSlack) {
  EXPECT_TRUE(within_bound(1.0, 1.0));
  EXPECT_TRUE(within_bound(1.0 + 1e-11, 1.0));
  EXPECT_FALSE(within_bound(1.0 + 1e-9, 1.0));
  EXPECT_TRUE(within_bound(0.0, 0.0));
}
