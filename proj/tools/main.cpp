#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "matrix_io.hpp"
#include "svdpert/errors.hpp"

using namespace svdpert;
using namespace svdpert::cli;

namespace {

// Input problems (bad files, flags, shapes) are usage errors; anything the
// numerics raise afterwards counts as a failed run.
int exit_code_for(const Error& e) {
  const std::string k = e.kind();
  if (k == "parse" || k == "precondition" || k == "dimension" || k == "not_hermitian") return kUsage;
  return kFailed;
}

int emit(const Json& report, const std::string& out_path) {
  const std::string text = dump(report);
  if (out_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return 0;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!(f << text)) {
    std::fprintf(stderr, "svdpert: cannot write %s\n", out_path.c_str());
    return 1;
  }
  return 0;
}

const std::vector<std::string> kNorms = {"spectral", "frobenius", "nuclear"};

const CLI::Validator kPositive(
    [](std::string& s) -> std::string {
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos ||
          s.find_first_not_of('0') == std::string::npos) {
        return "must be a positive integer, got '" + s + "'";
      }
      return {};
    },
    "POSITIVE");

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified perturbation bounds for singular subspaces"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string out_path;
  std::string norm = "frobenius", pairing = "blockdiag";

  BoundOptions bo;
  std::string bu, bv;
  auto* bound = app.add_subcommand("bound", "Certify the rotation and corollary bounds for G + E");
  bound->add_option("--g", bo.g, "unperturbed matrix file")->required();
  bound->add_option("--e", bo.e, "perturbation file")->required();
  bound->add_option("--r", bo.r, "leading block size")->required()->check(kPositive);
  auto* ou = bound->add_option("--u", bu, "left unitary of the block split");
  auto* ov = bound->add_option("--v", bv, "right unitary of the block split");
  ou->needs(ov);
  ov->needs(ou);
  bound->add_option("--norm", norm, "norm of the pairing")->check(CLI::IsMember(kNorms));
  bound->add_option("--pairing", pairing, "blockdiag or max")
      ->check(CLI::IsMember({"blockdiag", "max"}));
  bound->add_flag("--force", bo.force, "solve even when the gap condition fails");
  bound->add_option("--out", out_path, "write the report here instead of stdout");

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "Run seeded property suites");
  verify->add_option("--suite", vo.suite, "sylvester, perturb, sintheta or all");
  verify->add_option("--trials", vo.trials, "trials per suite");
  verify->add_option("--seed", vo.seed, "base seed");
  verify->add_option("--max-dim", vo.max_dim, "largest matrix dimension");
  verify->add_option("--out", out_path, "write the report here instead of stdout");

  SinThetaOptions so;
  std::string su2, sv2;
  std::string snorm = "spectral";
  auto* sintheta = app.add_subcommand("sintheta", "Sin-theta certificate for an approximate singular triplet");
  sintheta->add_option("--g", so.g, "matrix file")->required();
  sintheta->add_option("--u1t", so.u1t, "approximate left basis")->required();
  sintheta->add_option("--v1t", so.v1t, "approximate right basis")->required();
  sintheta->add_option("--g1t", so.g1t, "approximate leading block")->required();
  auto* o2u = sintheta->add_option("--u2", su2, "left complement of G's decomposition");
  auto* o2v = sintheta->add_option("--v2", sv2, "right complement of G's decomposition");
  o2u->needs(o2v);
  o2v->needs(o2u);
  sintheta->add_option("--norm", snorm, "unitarily invariant norm")->check(CLI::IsMember(kNorms));
  sintheta->add_option("--out", out_path, "write the report here instead of stdout");

  GenOptions go;
  auto* gen = app.add_subcommand("gen", "Write a seeded instance as matrix files");
  gen->add_option("--kind", go.kind, "instance or exhibit")->check(CLI::IsMember({"instance", "exhibit"}));
  gen->add_option("--m", go.m)->check(kPositive);
  gen->add_option("--n", go.n)->check(kPositive);
  gen->add_option("--r", go.r)->check(kPositive);
  gen->add_option("--profile", go.profile, "interval or interleaved")
      ->check(CLI::IsMember({"interval", "interleaved"}));
  gen->add_option("--gap", go.gap, "interval width or minimum gap");
  gen->add_option("--scale", go.scale, "Frobenius norm of E (instance)");
  gen->add_option("--ratio", go.ratio, "off-diagonal size relative to the width (exhibit)");
  gen->add_option("--seed", go.seed);
  gen->add_option("--dir", go.dir, "output directory")->required();
  gen->add_option("--out", out_path, "write the report here instead of stdout");

  std::string command = "svdpert";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    for (auto* sub : app.get_subcommands()) command = sub->get_name();
    emit(error_report(command, "usage", e.what()), "");
    std::fprintf(stderr, "svdpert: %s\n", e.what());
    return kUsage;
  }

  CommandResult res;
  try {
    if (bound->parsed()) {
      command = "bound";
      if (!bu.empty()) {
        bo.u = bu;
        bo.v = bv;
      }
      bo.norm = parse_norm_kind(norm);
      bo.pairing = parse_pairing_kind(pairing);
      res = cmd_bound(bo);
    } else if (verify->parsed()) {
      command = "verify";
      res = cmd_verify(vo);
    } else if (sintheta->parsed()) {
      command = "sintheta";
      if (!su2.empty()) {
        so.u2 = su2;
        so.v2 = sv2;
      }
      so.norm = parse_norm_kind(snorm);
      res = cmd_sintheta(so);
    } else {
      command = "gen";
      res = cmd_gen(go);
    }
  } catch (const ParseError& e) {
    Json rep = error_report(command, e.kind(), e.what());
    rep["error"]["line"] = e.line;
    rep["error"]["column"] = e.column;
    emit(rep, out_path);
    std::fprintf(stderr, "svdpert %s: %s\n", command.c_str(), e.what());
    return kUsage;
  } catch (const Error& e) {
    emit(error_report(command, e.kind(), e.what()), out_path);
    std::fprintf(stderr, "svdpert %s: %s\n", command.c_str(), e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    emit(error_report(command, "internal", e.what()), out_path);
    std::fprintf(stderr, "svdpert %s: %s\n", command.c_str(), e.what());
    return kFailed;
  }
  if (emit(res.report, out_path) != 0) return kFailed;
  return res.exit_code;
}
