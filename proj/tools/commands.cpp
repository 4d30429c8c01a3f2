#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "instances.hpp"
#include "matrix_io.hpp"
#include "svdpert/errors.hpp"
#include "svdpert/oracle.hpp"
#include "svdpert/perturb.hpp"
#include "svdpert/sintheta.hpp"

namespace svdpert::cli {

namespace {

class PhaseTimer {
 public:
  explicit PhaseTimer(Json& sink) : sink_(sink), t0_(std::chrono::steady_clock::now()) {}
  void mark(const char* phase) {
    const auto now = std::chrono::steady_clock::now();
    sink_[phase] = std::chrono::duration<double, std::milli>(now - t0_).count();
    t0_ = now;
  }

 private:
  Json& sink_;
  std::chrono::steady_clock::time_point t0_;
};

struct LoadedMatrix {
  Matrix a;
  Json digest;
};

LoadedMatrix load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  LoadedMatrix out{parse_matrix(text, path), Json::object()};
  out.digest["path"] = path;
  out.digest["fnv1a64"] = hex64(fnv1a64(text));
  out.digest["rows"] = out.a.rows();
  out.digest["cols"] = out.a.cols();
  return out;
}

Json gap_json(const GapReport& rep) {
  return Json{{"delta", num(rep.delta)},
              {"delta_under", num(rep.delta_under)},
              {"epsilon", num(rep.epsilon)},
              {"g_norm", num(rep.g_norm)},
              {"kappa2", num(rep.kappa2)},
              {"c", num(rep.c)},
              {"separation", to_string(rep.separation)},
              {"pairing", pairing_json(rep.pairing)},
              {"condition_met", rep.condition_met},
              {"e11_norm", num(rep.e11_norm)},
              {"e22_norm", num(rep.e22_norm)},
              {"sigma_min_g1", num(rep.sigma_min_g1)},
              {"sigma_max_g2", num(rep.sigma_max_g2)}};
}

// relation: "le" means measured <= bound, "ge" means measured >= bound
Json bound_entry(const std::string& id, bool condition_met, double bound, double measured,
                 const char* relation, std::optional<bool> satisfied) {
  Json j{{"id", id},
         {"condition_met", condition_met},
         {"bound_value", num(bound)},
         {"measured_value", num(measured)},
         {"relation", relation}};
  j["satisfied"] = satisfied ? Json(*satisfied) : Json(nullptr);
  return j;
}

Json check_entry(const std::string& id, double measured, double threshold, bool passed) {
  return Json{{"id", id}, {"measured", num(measured)}, {"threshold", num(threshold)}, {"passed", passed}};
}

bool le(double measured, double bound) { return measured <= bound * (1.0 + 1e-9) + 1e-300; }

}  // namespace

Json report_header(const std::string& command) {
  return Json{{"tool_version", kToolVersion}, {"command", command}};
}

Json error_report(const std::string& command, const std::string& kind, const std::string& message) {
  Json j = report_header(command);
  j["error"] = Json{{"kind", kind}, {"message", message}};
  return j;
}

CommandResult cmd_bound(const BoundOptions& o) {
  CommandResult res;
  Json& rep_json = res.report;
  rep_json = report_header("bound");
  Json timings = Json::object();
  PhaseTimer timer(timings);

  const LoadedMatrix g = load(o.g);
  const LoadedMatrix e = load(o.e);
  Json inputs{{"g", g.digest}, {"e", e.digest}};
  std::optional<LoadedMatrix> u, v;
  if (o.u.has_value() != o.v.has_value()) throw PreconditionError("--u and --v go together");
  if (o.u) {
    u = load(*o.u);
    v = load(*o.v);
    inputs["u"] = u->digest;
    inputs["v"] = v->digest;
  }
  inputs["r"] = o.r;
  inputs["norm"] = to_string(o.norm);
  inputs["pairing"] = to_string(o.pairing);
  inputs["force"] = o.force;
  rep_json["inputs"] = inputs;
  timer.mark("parse");

  const BlockContext ctx = u ? split_context(g.a, u->a, v->a, o.r) : split_context_svd(g.a, o.r);
  const PerturbationBlocks eb = project_perturbation(ctx, e.a);
  const PairingNorm pairing{o.pairing, o.norm};
  const GapReport rep = gap_quantities(ctx, eb, pairing);
  rep_json["gap_report"] = gap_json(rep);
  timer.mark("split");

  const ComparisonReport cmp = corollary_suite(ctx, eb);
  Json cmp_json{{"eps_hat", num(cmp.eps_hat)},
                {"eps_tilde", num(cmp.eps_tilde)},
                {"epsilon", num(cmp.epsilon)},
                {"delta_under", num(cmp.delta_under)},
                {"stewart_condition_met", cmp.stewart_condition_met},
                {"stewart_bound", num(cmp.stewart_bound)},
                {"naive_condition_met", cmp.naive_condition_met},
                {"naive_bound", num(cmp.naive_bound)}};
  Json entries = Json::array();
  for (const auto& c : cmp.entries) {
    entries.push_back(Json{{"id", c.id},
                           {"measured_in", pairing_json(c.measured_in)},
                           {"condition_met", c.condition_met},
                           {"kappa", num(c.kappa)},
                           {"bound", num(c.bound)}});
  }
  cmp_json["entries"] = entries;
  rep_json["comparison"] = cmp_json;
  timer.mark("comparison");

  if (!rep.condition_met && !o.force) {
    rep_json["status"] = "condition_not_met";
    rep_json["rotation"] = nullptr;
    rep_json["bounds"] = Json::array();
    rep_json["timings"] = timings;
    res.exit_code = kFailed;
    return res;
  }

  const RotationPair rot = solve_rotations(ctx, eb, rep, o.force);
  rep_json["rotation"] = Json{{"iterations", rot.iterations},
                              {"final_step_norm", num(rot.final_step_norm)},
                              {"residual_1", num(rot.residual_1)},
                              {"residual_2", num(rot.residual_2)},
                              {"pair_norm", num(rot.pair_norm)},
                              {"gamma_frobenius", num(rot.gamma.frobenius_norm())},
                              {"omega_frobenius", num(rot.omega.frobenius_norm())},
                              {"guaranteed", rot.guaranteed}};
  timer.mark("rotations");

  const CorrectedDecomposition cd = build_corrected(ctx, eb, rot, rep);
  timer.mark("corrected");

  bool all_ok = true;
  Json bounds = Json::array();
  auto add_le = [&](const std::string& id, bool cond, double bound, double measured) {
    std::optional<bool> sat;
    if (cond) {
      sat = le(measured, bound);
      all_ok = all_ok && *sat;
    }
    bounds.push_back(bound_entry(id, cond, bound, measured, "le", sat));
  };
  add_le("rotation.pair_norm", rep.condition_met,
         rep.condition_met ? rotation_bound(rep) : std::nan(""), rot.pair_norm);
  for (const auto& c : cmp.entries) {
    add_le("corollary." + c.id, c.condition_met, c.bound,
           pair_norm(rot.gamma, rot.omega, c.measured_in));
  }
  for (NormKind k : kAllNorms) {
    const std::size_t i = static_cast<std::size_t>(k);
    add_le("u1_distance." + std::string(to_string(k)), true, cd.gamma_norm[i], cd.u1_dist[i]);
    add_le("v1_distance." + std::string(to_string(k)), true, cd.omega_norm[i], cd.v1_dist[i]);
  }
  rep_json["bounds"] = bounds;

  const Matrix gt = g.a + e.a;
  const double gt_f = gt.frobenius_norm();
  Json checks = Json::array();
  auto add_check = [&](const std::string& id, double measured, double threshold) {
    const bool ok = measured <= threshold;
    all_ok = all_ok && ok;
    checks.push_back(check_entry(id, measured, threshold, ok));
  };
  add_check("offdiag_residual", cd.offdiag_residual, 1e-9 * gt_f);
  add_check("multiset_identity", cd.multiset_defect, cd.multiset_tol);
  add_check("closed_form_agreement", cd.closed_form_defect, 1e-10);
  add_check("u1_footnote", std::abs(cd.u1_dist[0] - cd.u1_footnote), 1e-12);
  add_check("v1_footnote", std::abs(cd.v1_dist[0] - cd.v1_footnote), 1e-12);
  rep_json["checks"] = checks;

  Json sigma{{"sigma_min_g1_check", num(cd.sigma_min_g1)},
             {"sigma_max_g2_check", num(cd.sigma_max_g2)},
             {"sigma_min_g1_lower", num(cd.sigma_min_g1_lower)},
             {"sigma_max_g2_upper", num(cd.sigma_max_g2_upper)}};
  if (rep.condition_met) {
    const double tol = 1e-10 * (1.0 + ui_norm(gt, NormKind::Spectral));
    const bool ok = cd.sigma_min_g1 >= cd.sigma_min_g1_lower - tol &&
                    cd.sigma_max_g2 <= cd.sigma_max_g2_upper + tol;
    sigma["within"] = ok;
    all_ok = all_ok && ok;
  } else {
    sigma["within"] = nullptr;
  }
  if (rep.condition_met && rep.separation == Separation::IntervalSeparated && rep.c == 1.0) {
    const ImprovedSigmaBounds ib = improved_sigma_bounds(ctx, eb, cd, rep);
    sigma["improved"] = Json{{"lower", num(ib.lower)},
                             {"upper", num(ib.upper)},
                             {"measured", num(ib.measured)},
                             {"term", num(ib.term)},
                             {"in_interval", ib.in_interval},
                             {"blocks_separated", ib.blocks_separated},
                             {"top_r_defect", num(ib.top_r_defect)},
                             {"top_r_match", ib.top_r_match},
                             {"per_index_worst", num(ib.per_index_worst)},
                             {"per_index_ok", ib.per_index_ok}};
    all_ok = all_ok && ib.all();
  } else {
    sigma["improved"] = nullptr;
  }
  rep_json["sigma_bounds"] = sigma;
  timer.mark("certificates");

  rep_json["status"] = all_ok ? "ok" : "certificate_failed";
  rep_json["timings"] = timings;
  res.exit_code = all_ok ? kOk : kFailed;
  return res;
}

CommandResult cmd_sintheta(const SinThetaOptions& o) {
  CommandResult res;
  Json& out = res.report;
  out = report_header("sintheta");
  Json timings = Json::object();
  PhaseTimer timer(timings);

  SinThetaInput inp;
  Json inputs = Json::object();
  auto take = [&](const char* name, const std::string& path, Matrix& dst) {
    LoadedMatrix lm = load(path);
    inputs[name] = lm.digest;
    dst = std::move(lm.a);
  };
  take("g", o.g, inp.g);
  take("u1t", o.u1t, inp.u1_t);
  take("v1t", o.v1t, inp.v1_t);
  take("g1t", o.g1t, inp.g1_t);
  if (o.u2.has_value() != o.v2.has_value()) throw PreconditionError("--u2 and --v2 go together");
  if (o.u2) {
    take("u2", *o.u2, inp.u2);
    take("v2", *o.v2, inp.v2);
  }
  inputs["norm"] = to_string(o.norm);
  out["inputs"] = inputs;
  timer.mark("parse");

  const SinThetaCertificate c = sin_theta_certificate(inp, o.norm);
  timer.mark("certificate");
  out["angles_u"] = nums(c.angles_u.angles);
  out["angles_v"] = nums(c.angles_v.angles);
  out["sines_u"] = nums(c.angles_u.sines);
  out["sines_v"] = nums(c.angles_v.sines);
  out["residual_r_frobenius"] = num(c.r_norm);
  out["residual_s_frobenius"] = num(c.s_norm);
  out["delta"] = num(c.delta);
  out["c"] = num(c.c);
  out["lhs"] = num(c.lhs);
  out["rhs_norm"] = num(c.rhs_norm);
  out["bound"] = num(c.bound);
  out["sin_identity_defect"] = num(c.sin_identity_defect);
  out["bounds"] = Json::array({bound_entry(std::string("sintheta.") + std::string(to_string(o.norm)),
                                           true, c.bound, c.lhs, "le", c.satisfied)});
  out["satisfied"] = c.satisfied;
  out["status"] = c.satisfied ? "ok" : "certificate_failed";
  out["timings"] = timings;
  res.exit_code = c.satisfied ? kOk : kFailed;
  return res;
}

CommandResult cmd_gen(const GenOptions& o) {
  CommandResult res;
  Json& out = res.report;
  out = report_header("gen");
  Json timings = Json::object();
  PhaseTimer timer(timings);
  if (o.dir.empty()) throw PreconditionError("--dir is required");

  oracle::Instance inst;
  Json spec{{"kind", o.kind}, {"m", o.m}, {"n", o.n}, {"r", o.r}, {"seed", o.seed}};
  if (o.kind == "instance") {
    oracle::GapProfile gp;
    if (o.profile == "interval") {
      gp = oracle::GapProfile::interval(o.gap);
    } else if (o.profile == "interleaved") {
      gp = oracle::GapProfile::interleaved(o.gap);
    } else {
      throw PreconditionError("unknown gap profile '" + o.profile + "'");
    }
    inst = oracle::gen_instance({o.m, o.n, o.r, gp, o.scale, o.seed});
    spec["profile"] = o.profile;
    spec["gap"] = num(o.gap);
    spec["scale"] = num(o.scale);
  } else if (o.kind == "exhibit") {
    inst = oracle::gen_offdiag_instance(o.m, o.n, o.r, o.gap, o.ratio, o.seed);
    spec["gap"] = num(o.gap);
    spec["ratio"] = num(o.ratio);
  } else {
    throw PreconditionError("unknown instance kind '" + o.kind + "'");
  }
  out["inputs"] = spec;
  timer.mark("generate");

  std::filesystem::create_directories(o.dir);
  const std::string note = "svdpert gen " + o.kind + " seed " + std::to_string(o.seed);
  Json files = Json::object();
  auto save = [&](const char* name, const Matrix& a) {
    const std::string path = (std::filesystem::path(o.dir) / (std::string(name) + ".txt")).string();
    std::ostringstream ss;
    write_matrix(ss, a, note);
    std::ofstream f(path, std::ios::binary);
    if (!(f << ss.str())) throw PreconditionError("cannot write " + path);
    files[name] = Json{{"path", path}, {"fnv1a64", hex64(fnv1a64(ss.str()))}};
  };
  save("g", inst.ctx.g);
  save("e", inst.e);
  save("u", inst.ctx.u);
  save("v", inst.ctx.v);
  // perturbed singular triplet nearest to (U1, V1), ready for the sintheta command
  const SinThetaInput st = sintheta_input(inst);
  save("u1t", st.u1_t);
  save("v1t", st.v1_t);
  save("g1t", st.g1_t);
  save("u2", st.u2);
  save("v2", st.v2);
  out["files"] = files;
  out["sv_g1"] = nums(inst.sv_g1);
  out["sv_g2"] = nums(inst.sv_g2);
  timer.mark("write");
  out["status"] = "ok";
  out["timings"] = timings;
  return res;
}

}  // namespace svdpert::cli
