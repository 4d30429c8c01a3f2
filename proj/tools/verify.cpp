// Property suites behind `svdpert verify`. Trials run sequentially in seed
// order so that the report is a pure function of the flags.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "commands.hpp"
#include "instances.hpp"
#include "svdpert/errors.hpp"
#include "svdpert/oracle.hpp"
#include "svdpert/perturb.hpp"
#include "svdpert/sintheta.hpp"
#include "svdpert/sylvester.hpp"

namespace svdpert::cli {

namespace {

// Slack is threshold - measured (or bound - measured), so negative slack is a failure.
struct Tally {
  std::string id;
  std::size_t trials = 0, passed = 0, failed = 0, skipped = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::string first_failure;

  void record(double slack, const std::string& why = "") {
    ++trials;
    worst_slack = std::min(worst_slack, slack);
    if (slack >= 0.0) {
      ++passed;
    } else {
      ++failed;
      if (first_failure.empty()) first_failure = why;
    }
  }
  void fail(const std::string& why) {
    ++trials;
    ++failed;
    if (first_failure.empty()) first_failure = why;
  }
  void skip() {
    ++trials;
    ++skipped;
  }
  Json json() const {
    Json j{{"id", id},
           {"trials", trials},
           {"passed", passed},
           {"failed", failed},
           {"skipped", skipped},
           {"worst_slack", trials > skipped ? num(worst_slack) : Json(nullptr)}};
    j["first_failure"] = first_failure.empty() ? Json(nullptr) : Json(first_failure);
    return j;
  }
};

class Suite {
 public:
  explicit Suite(std::string name) : name_(std::move(name)) {}
  Tally& operator[](const std::string& id) {
    auto it = index_.find(id);
    if (it != index_.end()) return tallies_[it->second];
    index_[id] = tallies_.size();
    tallies_.emplace_back().id = id;
    return tallies_.back();
  }
  std::size_t failures() const {
    std::size_t f = 0;
    for (const auto& t : tallies_) f += t.failed;
    return f;
  }
  Json json() const {
    Json props = Json::array();
    for (const auto& t : tallies_) props.push_back(t.json());
    return Json{{"name", name_}, {"failed", failures()}, {"properties", props}};
  }

 private:
  std::string name_;
  std::vector<Tally> tallies_;
  std::map<std::string, std::size_t> index_;
};

// Property ids are declared up front so a zero-trial run still lists them.
void declare(Suite& s, std::initializer_list<const char*> ids) {
  for (const char* id : ids) s[id];
}

double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt, std::size_t trial) {
  return seed * 0x9e3779b97f4a7c15ULL + salt * 1000003ULL + trial;
}

void sylvester_suite(Suite& s, const VerifyOptions& o) {
  declare(s, {"oracle_equivalence", "square_padding", "certificates_satisfied",
              "spectral_pairings_coincide", "witness_ratio", "herm_bounds"});
  const std::size_t small = std::min<std::size_t>(o.max_dim, 6);
  for (std::size_t t = 0; t < o.trials; ++t) {
    const CoupledSylvesterProblem p = coupled_instance(mix(o.seed, 1, t), small, t % 2 == 0);
    const double gap = spectral_gap(p);
    if (gap <= gap_tolerance(p.a, p.b)) {
      s["oracle_equivalence"].skip();
      s["certificates_satisfied"].skip();
      s["spectral_pairings_coincide"].skip();
    } else {
      const SolutionPair sol = solve_coupled(p);
      const auto ref = oracle::vectorized_coupled_solve(p.a, p.b, p.s_rhs, p.t_rhs);
      const double err =
          std::hypot((sol.x - ref.x).frobenius_norm(), (sol.y - ref.y).frobenius_norm()) /
          std::max(1e-300, std::hypot(ref.x.frobenius_norm(), ref.y.frobenius_norm()));
      s["oracle_equivalence"].record(1e-9 - err, "relative error " + std::to_string(err));

      double worst = std::numeric_limits<double>::infinity();
      std::string why;
      for (const auto& c : coupled_bounds(p, sol)) {
        const double sl = c.bound_value * (1 + 1e-10) - c.measured;
        if (sl < worst) {
          worst = sl;
          why = c.id;
        }
      }
      s["certificates_satisfied"].record(worst, why);

      const double bd = pair_norm(sol.x, sol.y, PairingNorm::block_diag(NormKind::Spectral));
      const double mx = pair_norm(sol.x, sol.y, PairingNorm::max_of(NormKind::Spectral));
      s["spectral_pairings_coincide"].record(1e-12 - rel(bd, mx));
    }

    // square B: padding must be the identity and the solutions must agree
    {
      CoupledSylvesterProblem q = coupled_instance(mix(o.seed, 2, t), small, true);
      q.b = q.b.block(0, 0, std::min(q.b.rows(), q.b.cols()), std::min(q.b.rows(), q.b.cols()));
      q.s_rhs = q.s_rhs.rows_range(0, q.b.rows());
      q.t_rhs = q.t_rhs.rows_range(0, q.b.cols());
      const CoupledSylvesterProblem padded = pad_to_square(q);
      const SolutionPair a = solve_coupled(q);
      const SolutionPair b = solve_coupled(padded);
      const double d = std::hypot((a.x - b.x).frobenius_norm(), (a.y - b.y).frobenius_norm());
      const bool shape_ok = padded.b.rows() == q.b.rows() && padded.b.cols() == q.b.cols();
      s["square_padding"].record(shape_ok ? 1e-12 * (1 + a.x.frobenius_norm()) - d : -1.0);
    }

    {
      const CoupledSylvesterProblem w = coupled_instance(mix(o.seed, 3, t), small, true);
      const EqualityWitness ew = equality_witness(w.a, w.b);
      s["witness_ratio"].record(1e-10 - ew.worst_deviation);
    }

    {
      const HermSylvesterProblem h = herm_instance(mix(o.seed, 4, t), small, t % 2 == 0);
      try {
        const Matrix x = solve_herm_sylvester(h);
        double worst = std::numeric_limits<double>::infinity();
        std::string why;
        for (const auto& c : herm_bounds(h, x)) {
          const double sl = c.bound_value * (1 + 1e-10) - c.measured;
          if (sl < worst) {
            worst = sl;
            why = c.id;
          }
        }
        s["herm_bounds"].record(worst, why);
      } catch (const SingularProblemError&) {
        s["herm_bounds"].skip();
      }
    }
  }
}

void perturb_suite(Suite& s, const VerifyOptions& o) {
  declare(s, {"convergence_bound", "offdiag_annihilation", "multiset_identity",
              "closed_form_agreement", "distance_certificates", "footnote_distance",
              "T_lower_bound", "phi_quadratic", "phi_lipschitz", "stewart_dominance"});
  const std::size_t top = std::min<std::size_t>(o.max_dim, 30);
  std::mt19937_64 rng(mix(o.seed, 5, 0));
  std::uniform_int_distribution<std::size_t> dim(2, top);
  std::uniform_real_distribution<double> logk(std::log(1e-6), std::log(0.2));
  std::uniform_real_distribution<double> width(0.2, 2.0);
  for (std::size_t t = 0; t < o.trials; ++t) {
    oracle::InstanceSpec spec;
    spec.m = dim(rng);
    spec.n = dim(rng);
    spec.r = std::uniform_int_distribution<std::size_t>(
        1, std::min<std::size_t>(5, std::min(spec.m, spec.n) - 1))(rng);
    spec.gap = t % 2 == 0 ? oracle::GapProfile::interval(width(rng))
                          : oracle::GapProfile::interleaved(0.05);
    spec.seed = mix(o.seed, 6, t);
    const PairingNorm p = kPairings[t % kPairings.size()];
    const double target = std::exp(logk(rng));
    const oracle::Instance inst = kappa_instance(spec, p, target);
    const GapReport rep = gap_quantities(inst.ctx, inst.eb, p);
    const std::string tag = "trial " + std::to_string(t);

    if (!rep.condition_met) {
      for (const char* id : {"convergence_bound", "offdiag_annihilation", "multiset_identity",
                             "closed_form_agreement", "distance_certificates", "footnote_distance"}) {
        s[id].skip();
      }
    } else {
      try {
        const RotationPair rot = solve_rotations(inst.ctx, inst.eb, rep);
        const double bound = rotation_bound(rep);
        s["convergence_bound"].record(bound * (1 + 1e-9) - rot.pair_norm, tag);
        try {
          const CorrectedDecomposition cd = build_corrected(inst.ctx, inst.eb, rot, rep);
          const double gf = (inst.ctx.g + inst.e).frobenius_norm();
          s["offdiag_annihilation"].record(1e-9 * gf - cd.offdiag_residual, tag);
          s["multiset_identity"].record(cd.multiset_tol - cd.multiset_defect, tag);
          s["closed_form_agreement"].record(1e-10 - cd.closed_form_defect, tag);
          double dist = std::numeric_limits<double>::infinity();
          for (std::size_t k = 0; k < 3; ++k) {
            dist = std::min({dist, cd.gamma_norm[k] * (1 + 1e-12) + 1e-15 - cd.u1_dist[k],
                             cd.omega_norm[k] * (1 + 1e-12) + 1e-15 - cd.v1_dist[k]});
          }
          s["distance_certificates"].record(dist, tag);
          s["footnote_distance"].record(
              1e-12 - std::max(std::abs(cd.u1_dist[0] - cd.u1_footnote),
                               std::abs(cd.v1_dist[0] - cd.v1_footnote)),
              tag);
        } catch (const VerificationError& e) {
          for (const char* id : {"offdiag_annihilation", "multiset_identity",
                                 "closed_form_agreement", "distance_certificates",
                                 "footnote_distance"}) {
            s[id].fail(tag + ": " + e.what());
          }
        }
      } catch (const Error& e) {
        for (const char* id : {"convergence_bound", "offdiag_annihilation", "multiset_identity",
                               "closed_form_agreement", "distance_certificates",
                               "footnote_distance"}) {
          s[id].fail(tag + ": " + e.what());
        }
      }
    }

    // random pairs against the operator and the quadratic map
    const std::size_t mr = spec.m - spec.r, nr = spec.n - spec.r;
    const Matrix g1 = oracle::gaussian(mr, spec.r, rng), o1 = oracle::gaussian(nr, spec.r, rng);
    const Matrix g2 = oracle::gaussian(mr, spec.r, rng), o2 = oracle::gaussian(nr, spec.r, rng);
    if (rep.delta_under > 0.0) {
      auto [t1, t2] = apply_T(inst.ctx, inst.eb, g1, o1);
      s["T_lower_bound"].record(pair_norm(t1, t2, p) - rep.delta_under / rep.c * pair_norm(g1, o1, p) +
                                    1e-9,
                                tag);
    } else {
      s["T_lower_bound"].skip();
    }
    auto [a1, a2] = apply_phi(inst.eb, g1, o1);
    auto [b1, b2] = apply_phi(inst.eb, g2, o2);
    const double x = pair_norm(g1, o1, p), y = pair_norm(g2, o2, p);
    s["phi_quadratic"].record(rep.epsilon * x * x * (1 + 1e-12) + 1e-14 - pair_norm(a1, a2, p), tag);
    s["phi_lipschitz"].record(2.0 * rep.epsilon * std::max(x, y) *
                                      pair_norm(g1 - g2, o1 - o2, p) * (1 + 1e-12) +
                                  1e-14 - pair_norm(a1 - b1, a2 - b2, p),
                              tag);

    const ComparisonReport cmp = corollary_suite(inst.ctx, inst.eb);
    if (!cmp.stewart_condition_met) {
      s["stewart_dominance"].skip();
    } else {
      const auto& f1 = cmp.entry("cor.F1");
      s["stewart_dominance"].record(f1.condition_met ? cmp.stewart_bound - f1.bound : -1.0, tag);
    }
  }
}

void sintheta_suite(Suite& s, const VerifyOptions& o) {
  declare(s, {"certificate_spectral", "certificate_frobenius", "certificate_nuclear",
              "sine_identity", "permutation_invariance"});
  const std::size_t top = std::min<std::size_t>(o.max_dim, 12);
  std::mt19937_64 rng(mix(o.seed, 7, 0));
  std::uniform_int_distribution<std::size_t> dim(2, top);
  std::uniform_real_distribution<double> frac(0.0, 0.3);
  for (std::size_t t = 0; t < o.trials; ++t) {
    oracle::InstanceSpec spec;
    spec.m = dim(rng);
    spec.n = dim(rng);
    spec.r = std::uniform_int_distribution<std::size_t>(1, std::min(spec.m, spec.n) - 1)(rng);
    spec.gap = t % 2 == 0 ? oracle::GapProfile::interval(1.0)
                          : oracle::GapProfile::interleaved(0.3);
    spec.pert_scale = frac(rng) * spec.gap.value;
    spec.seed = mix(o.seed, 8, t);
    const std::string tag = "trial " + std::to_string(t);
    const SinThetaInput inp = sintheta_input(oracle::gen_instance(spec));

    double identity = 0.0;
    for (NormKind k : kAllNorms) {
      const std::string id = "certificate_" + std::string(to_string(k));
      try {
        const SinThetaCertificate c = sin_theta_certificate(inp, k);
        s[id].record(c.bound * (1 + 1e-10) + 1e-13 - c.lhs, tag);
        identity = std::max(identity, c.sin_identity_defect);
      } catch (const PreconditionError&) {
        s[id].skip();
      }
    }
    s["sine_identity"].record(1e-10 - identity, tag);

    // reverse the columns of the perturbed basis; angles must not move
    std::vector<std::size_t> perm(spec.r);
    std::iota(perm.rbegin(), perm.rend(), std::size_t{0});
    Matrix shuffled(inp.u1_t.rows(), spec.r);
    for (std::size_t j = 0; j < spec.r; ++j) shuffled.set_block(0, j, inp.u1_t.col(perm[j]));
    const Matrix u1 = svd(inp.g).u.cols_range(0, spec.r);
    const CanonicalAngles a = canonical_angles({u1, inp.u1_t});
    const CanonicalAngles b = canonical_angles({u1, shuffled});
    double d = 0.0;
    for (std::size_t j = 0; j < a.angles.size(); ++j) d = std::max(d, std::abs(a.angles[j] - b.angles[j]));
    s["permutation_invariance"].record(1e-12 - d, tag);
  }
}

}  // namespace

CommandResult cmd_verify(const VerifyOptions& o) {
  CommandResult res;
  Json& out = res.report;
  out = report_header("verify");
  if (o.suite != "sylvester" && o.suite != "perturb" && o.suite != "sintheta" && o.suite != "all") {
    throw PreconditionError("unknown suite '" + o.suite + "'");
  }
  if (o.max_dim < 2) throw PreconditionError("--max-dim must be at least 2");
  out["inputs"] = Json{{"suite", o.suite}, {"trials", o.trials}, {"seed", o.seed}, {"max_dim", o.max_dim}};

  Json timings = Json::object();
  Json suites = Json::array();
  std::size_t failures = 0;
  const std::vector<std::pair<const char*, void (*)(Suite&, const VerifyOptions&)>> all = {
      {"sylvester", sylvester_suite}, {"perturb", perturb_suite}, {"sintheta", sintheta_suite}};
  for (const auto& [name, fn] : all) {
    if (o.suite != "all" && o.suite != name) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Suite s(name);
    fn(s, o);
    failures += s.failures();
    suites.push_back(s.json());
    timings[name] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  out["suites"] = suites;
  out["failed"] = failures;
  out["status"] = failures == 0 ? "ok" : "property_failed";
  out["timings"] = timings;
  res.exit_code = failures == 0 ? kOk : kFailed;
  return res;
}

}  // namespace svdpert::cli
