// One line per acceptance criterion: PASS/FAIL, the criterion, and what was measured.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "instances.hpp"
#include "matrix_io.hpp"
#include "svdpert/errors.hpp"
#include "svdpert/linalg.hpp"
#include "svdpert/oracle.hpp"
#include "svdpert/perturb.hpp"
#include "svdpert/sintheta.hpp"
#include "svdpert/sylvester.hpp"

using namespace svdpert;
using namespace svdpert::cli;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int g_failures = 0;

void run(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("uncaught exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++g_failures;
  std::printf("%s criterion %2d: %s [%s] (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title,
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared main-theorem instances (criteria 4-7, 9)

struct MainCase {
  oracle::Instance inst;
  PairingNorm pairing;
  double kappa_target = 0.0;
  double scale = 0.0;  // ||E||_F
  GapReport rep;
  std::optional<RotationPair> rot;
  std::optional<CorrectedDecomposition> cd;
  std::string error;
};

std::vector<MainCase> build_main_cases() {
  std::vector<MainCase> cases;
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> dim(2, 30);
  std::uniform_real_distribution<double> logk(std::log(1e-7), std::log(0.2));
  std::uniform_real_distribution<double> width(0.2, 2.0);
  for (int i = 0; cases.size() < 500; ++i) {
    oracle::InstanceSpec spec;
    spec.m = dim(rng);
    spec.n = dim(rng);
    const std::size_t mn = std::min(spec.m, spec.n);
    spec.r = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(5, mn - 1))(rng);
    spec.gap = i % 2 == 0 ? oracle::GapProfile::interval(width(rng))
                          : oracle::GapProfile::interleaved(0.05);
    spec.pert_scale = 1.0;
    spec.seed = 1000 + static_cast<std::uint64_t>(i);
    const double target = std::exp(logk(rng));

    MainCase c{oracle::gen_instance(spec), kPairings[cases.size() % kPairings.size()], target};
    c.scale = scale_for_kappa(c.inst, c.pairing, target);
    c.inst.e *= c.scale;
    c.inst.eb = scaled(c.inst.eb, c.scale);
    c.rep = gap_quantities(c.inst.ctx, c.inst.eb, c.pairing);
    try {
      c.rot = solve_rotations(c.inst.ctx, c.inst.eb, c.rep);
      c.cd = build_corrected(c.inst.ctx, c.inst.eb, *c.rot, c.rep);
    } catch (const Error& e) {
      c.error = e.what();
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

double gt_frobenius(const MainCase& c) { return (c.inst.ctx.g + c.inst.e).frobenius_norm(); }

}  // namespace

int main() {
  run(1, "coupled solver matches the vectorized oracle", [] {
    Outcome o;
    double worst = 0.0;
    int n = 0;
    for (std::uint64_t seed = 0; n < 1000; ++seed) {
      const CoupledSylvesterProblem p = coupled_instance(seed, 6, seed % 2 == 0);
      if (spectral_gap(p) < 0.1) continue;
      ++n;
      const SolutionPair sol = solve_coupled(p);
      const auto ref = oracle::vectorized_coupled_solve(p.a, p.b, p.s_rhs, p.t_rhs);
      const double err =
          std::hypot((sol.x - ref.x).frobenius_norm(), (sol.y - ref.y).frobenius_norm()) /
          std::max(1e-300, std::hypot(ref.x.frobenius_norm(), ref.y.frobenius_norm()));
      worst = std::max(worst, err);
    }
    o.pass = worst <= 1e-9;
    o.detail = std::to_string(n) + " instances, worst relative error " + fmt("%.3e", worst);
    return o;
  });

  run(2, "coupled Sylvester bound certificates", [] {
    Outcome o;
    int certs = 0, violations = 0, separated = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const CoupledSylvesterProblem p = coupled_instance(50000 + seed, 6, seed % 2 == 0);
      if (spectral_gap(p) <= gap_tolerance(p.a, p.b)) continue;
      const auto list = coupled_bounds(p, solve_coupled(p));
      bool has_b = false;
      for (const auto& c : list) {
        ++certs;
        if (!c.satisfied) ++violations;
        if (c.regime == Regime::IntervalSeparated) has_b = true;
        if (c.bound_value > 0.0) worst = std::max(worst, c.measured / c.bound_value);
      }
      const bool sep = singular_values(p.a).back() > sv_ext(p.b).max();
      if (sep) ++separated;
      // Frobenius once, then 3 norms x 2 pairings + spectral for (c), and for (b) when separated
      if (sep != has_b || list.size() != (sep ? 15u : 8u)) ++violations;
    }
    o.pass = violations == 0;
    o.detail = std::to_string(certs) + " certificates (" + std::to_string(separated) +
               " separated instances), " + std::to_string(violations) +
               " violations, max measured/bound " + fmt("%.4f", worst);
    return o;
  });

  run(3, "equality witness attains the separation gap", [] {
    Outcome o;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const CoupledSylvesterProblem p = coupled_instance(90000 + seed, 6, true);
      const EqualityWitness w = equality_witness(p.a, p.b);
      worst = std::max(worst, w.worst_deviation);
      if (w.ratios.size() != 6) o.pass = false;
    }
    o.pass = o.pass && worst <= 1e-10;
    o.detail = "200 instances x 6 norms, worst |ratio - delta| " + fmt("%.3e", worst);
    return o;
  });

  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<MainCase> cases = build_main_cases();
  std::printf("(built %zu main-theorem instances in %.1f s)\n", cases.size(),
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

  run(4, "main theorem end to end", [&] {
    Outcome o;
    int bad = 0, max_iter = 0;
    double worst_slack = std::numeric_limits<double>::infinity();
    double worst_off = 0.0, worst_ms = 0.0;
    std::string first;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const MainCase& c = cases[i];
      auto flag = [&](const std::string& why) {
        if (first.empty()) first = "case " + std::to_string(i) + ": " + why;
        ++bad;
      };
      if (!c.rep.condition_met || !(c.rep.kappa2 < 0.2)) {
        flag("kappa2 " + fmt("%.3e", c.rep.kappa2));
        continue;
      }
      if (!c.cd) {
        flag(c.error);
        continue;
      }
      max_iter = std::max(max_iter, c.rot->iterations);
      if (c.rot->iterations > 50) flag("iterations " + std::to_string(c.rot->iterations));
      const double bound = rotation_bound(c.rep);
      const double slack = bound - c.rot->pair_norm;
      worst_slack = std::min(worst_slack, slack / std::max(bound, 1e-300));
      if (slack < 0.0) flag("bound violated");
      const double gf = gt_frobenius(c);
      worst_off = std::max(worst_off, c.cd->offdiag_residual / gf);
      if (c.cd->offdiag_residual > 1e-9 * gf) flag("offdiag residual");
      worst_ms = std::max(worst_ms, c.cd->multiset_defect);
      if (c.cd->multiset_defect > 1e-9 * (1.0 + ui_norm(c.inst.ctx.g + c.inst.e, NormKind::Spectral))) {
        flag("multiset");
      }
    }
    o.pass = bad == 0;
    o.detail = std::to_string(cases.size()) + " instances, " + std::to_string(bad) +
               " failures, max iterations " + std::to_string(max_iter) +
               ", min relative slack " + fmt("%.3e", worst_slack) + ", max offdiag/|G~|_F " +
               fmt("%.2e", worst_off) + ", max multiset defect " + fmt("%.2e", worst_ms) +
               (first.empty() ? "" : "; first: " + first);
    return o;
  });

  run(5, "rotations match the direct SVD oracle", [&] {
    Outcome o;
    int used = 0, abstained = 0, bad = 0;
    double worst = 0.0;
    for (const MainCase& c : cases) {
      if (c.rep.separation != Separation::IntervalSeparated || !c.rot) continue;
      if (c.scale > 1e-2 * c.rep.delta_under) continue;
      const auto ref = oracle::direct_rotation_oracle(c.inst.ctx, c.inst.e);
      if (!ref) {
        ++abstained;
        continue;
      }
      ++used;
      const double d = std::hypot((c.rot->gamma - ref->gamma).frobenius_norm(),
                                  (c.rot->omega - ref->omega).frobenius_norm());
      worst = std::max(worst, d);
      if (d > 1e-8) ++bad;
    }
    o.pass = bad == 0 && used > 0;
    o.detail = std::to_string(used) + " instances compared, " + std::to_string(abstained) +
               " oracle abstentions, worst Frobenius difference " + fmt("%.3e", worst);
    return o;
  });

  run(6, "corrected subspace distances", [&] {
    Outcome o;
    int n = 0, bad = 0;
    double worst = 0.0;
    for (const MainCase& c : cases) {
      if (!c.cd) continue;
      ++n;
      const double d = std::max(std::abs(c.cd->u1_dist[0] - c.cd->u1_footnote),
                                std::abs(c.cd->v1_dist[0] - c.cd->v1_footnote));
      worst = std::max(worst, d);
      if (d > 1e-12 || !c.cd->distances_certified) ++bad;
    }
    o.pass = bad == 0 && n == static_cast<int>(cases.size());
    o.detail = std::to_string(n) + " instances, worst footnote deviation " + fmt("%.3e", worst) +
               ", " + std::to_string(bad) + " failures";
    return o;
  });

  run(7, "Frobenius corollary dominates the classical theorem", [&] {
    Outcome o;
    int stewart = 0, bad = 0;
    for (const MainCase& c : cases) {
      const ComparisonReport rep = corollary_suite(c.inst.ctx, c.inst.eb);
      const double f =
          std::hypot(c.inst.eb.e12.frobenius_norm(), c.inst.eb.e21.frobenius_norm());
      if (rep.eps_hat * rep.eps_hat < rep.epsilon * f * (1.0 - 1e-14)) ++bad;
      if (rep.stewart_condition_met) {
        ++stewart;
        const auto& f1 = rep.entry("cor.F1");
        if (!f1.condition_met || f1.bound > rep.stewart_bound) ++bad;
      }
    }
    o.pass = bad == 0;
    o.detail = std::to_string(cases.size()) + " instances, " + std::to_string(stewart) +
               " meet the classical condition, " + std::to_string(bad) + " violations";
    return o;
  });

  run(8, "shipped instance separates the naive and new spectral conditions", [] {
    Outcome o;
    const std::string dir = SVDPERT_DATA_DIR "/separation_exhibit";
    const Matrix g = cli::read_matrix_file(dir + "/g.txt");
    const Matrix e = cli::read_matrix_file(dir + "/e.txt");
    const Matrix u = cli::read_matrix_file(dir + "/u.txt");
    const Matrix v = cli::read_matrix_file(dir + "/v.txt");
    const BlockContext ctx = split_context(g, u, v, 20);
    const PerturbationBlocks eb = project_perturbation(ctx, e);
    const ComparisonReport rep = corollary_suite(ctx, eb);
    const auto& sp2 = rep.entry("cor.sp2");
    const auto& naive = rep.entry("naive_spectral");
    o.pass = !naive.condition_met && sp2.condition_met;
    o.detail = "m=n=40, r=20: naive kappa " + fmt("%.4f", naive.kappa) + ", new kappa " +
               fmt("%.4f", sp2.kappa) + " (threshold 0.25)";
    return o;
  });

  run(9, "improved singular value bounds", [&] {
    Outcome o;
    int n = 0, bad = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (const MainCase& c : cases) {
      if (c.rep.separation != Separation::IntervalSeparated || c.rep.c != 1.0 || !c.cd) continue;
      ++n;
      const ImprovedSigmaBounds b = improved_sigma_bounds(c.inst.ctx, c.inst.eb, *c.cd, c.rep);
      worst = std::max(worst, b.per_index_worst);
      if (!b.all()) ++bad;
    }
    o.pass = bad == 0 && n > 0;
    o.detail = std::to_string(n) + " separated instances, " + std::to_string(bad) +
               " violations, max per-index excess over the term " + fmt("%.3e", worst);
    return o;
  });

  run(10, "sin-theta certificates", [] {
    Outcome o;
    int bad = 0;
    double worst_identity = 0.0;
    double worst_ratio = 0.0;
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<std::size_t> dim(2, 12);
    std::uniform_real_distribution<double> frac(0.0, 0.3);
    for (int i = 0; i < 500; ++i) {
      oracle::InstanceSpec spec;
      spec.m = dim(rng);
      spec.n = dim(rng);
      spec.r = std::uniform_int_distribution<std::size_t>(1, std::min(spec.m, spec.n) - 1)(rng);
      spec.gap = i % 2 == 0 ? oracle::GapProfile::interval(1.0)
                            : oracle::GapProfile::interleaved(0.3);
      spec.pert_scale = frac(rng) * spec.gap.value;
      spec.seed = 70000 + static_cast<std::uint64_t>(i);
      const auto inst = oracle::gen_instance(spec);
      const SinThetaInput inp = sintheta_input(inst);
      for (NormKind k : kAllNorms) {
        const SinThetaCertificate c = sin_theta_certificate(inp, k);
        worst_identity = std::max(worst_identity, c.sin_identity_defect);
        if (c.bound > 0.0) worst_ratio = std::max(worst_ratio, c.lhs / c.bound);
        if (!c.satisfied || c.sin_identity_defect > 1e-10) ++bad;
        const bool separated = sv_ext(inp.g1_t).min() > sv_ext(inst.ctx.g2).max();
        const double want_c = (k == NormKind::Frobenius || separated) ? 1.0 : std::numbers::pi / 2;
        if (c.c != want_c) ++bad;
      }
    }
    o.pass = bad == 0;
    o.detail = "500 instances x 3 norms, " + std::to_string(bad) +
               " violations, max lhs/bound " + fmt("%.4f", worst_ratio) +
               ", worst sine identity defect " + fmt("%.2e", worst_identity);
    return o;
  });

  run(11, "interlacing inequalities", [] {
    Outcome o;
    int checks = 0, bad = 0;
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
      for (auto [m, n] : {std::pair<std::size_t, std::size_t>{5, 4}, {7, 7}}) {
        const Matrix b = oracle::gaussian(m, n, rng);
        for (std::size_t r = 1; r < std::min(m, n); ++r) {
          ++checks;
          if (!interlace_check(b, r).all()) ++bad;
        }
      }
    }
    o.pass = bad == 0;
    o.detail = std::to_string(checks) + " (matrix, r) checks, " + std::to_string(bad) +
               " violations";
    return o;
  });

  run(12, "operator T lower bound and phi contraction", [] {
    Outcome o;
    int bad = 0, checks = 0;
    for (std::size_t pi = 0; pi < kPairings.size(); ++pi) {
      const PairingNorm p = kPairings[pi];
      std::mt19937_64 rng(12 + pi);
      for (int i = 0; i < 500; ++i) {
        oracle::InstanceSpec spec;
        spec.m = 3 + i % 6;
        spec.n = 3 + (i / 6) % 5;
        spec.r = 1 + i % (std::min(spec.m, spec.n) - 1);
        spec.gap = i % 2 == 0 ? oracle::GapProfile::interval(0.5)
                              : oracle::GapProfile::interleaved(0.2);
        spec.pert_scale = 0.05;
        spec.seed = 80000 + pi * 1000 + static_cast<std::uint64_t>(i);
        const auto inst = oracle::gen_instance(spec);
        const GapReport rep = gap_quantities(inst.ctx, inst.eb, p);
        const std::size_t mr = spec.m - spec.r, nr = spec.n - spec.r;
        const Matrix g1 = oracle::gaussian(mr, spec.r, rng), o1 = oracle::gaussian(nr, spec.r, rng);
        const Matrix g2 = oracle::gaussian(mr, spec.r, rng), o2 = oracle::gaussian(nr, spec.r, rng);
        ++checks;
        if (rep.delta_under > 0.0) {
          auto [t1, t2] = apply_T(inst.ctx, inst.eb, g1, o1);
          if (pair_norm(t1, t2, p) < rep.delta_under / rep.c * pair_norm(g1, o1, p) - 1e-9) ++bad;
        }
        auto [a1, a2] = apply_phi(inst.eb, g1, o1);
        auto [b1, b2] = apply_phi(inst.eb, g2, o2);
        const double x = pair_norm(g1, o1, p), y = pair_norm(g2, o2, p);
        const double eps = rep.epsilon;
        if (pair_norm(a1, a2, p) > eps * x * x * (1 + 1e-12) + 1e-14) ++bad;
        if (pair_norm(a1 - b1, a2 - b2, p) >
            2.0 * eps * std::max(x, y) * pair_norm(g1 - g2, o1 - o2, p) * (1 + 1e-12) + 1e-14) {
          ++bad;
        }
      }
    }
    o.pass = bad == 0;
    o.detail = std::to_string(checks) + " random pairs over 6 pairings, " +
               std::to_string(bad) + " violations";
    return o;
  });

  std::printf("%s: %d of 12 criteria failed\n", g_failures ? "FAIL" : "PASS", g_failures);
  return g_failures ? 1 : 0;
}
