#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json_out.hpp"
#include "svdpert/linalg.hpp"

namespace svdpert::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kUsage = 2 };

struct CommandResult {
  Json report;
  int exit_code = kOk;
};

struct BoundOptions {
  std::string g, e;
  std::optional<std::string> u, v;
  std::size_t r = 0;
  NormKind norm = NormKind::Frobenius;
  PairingNorm::Kind pairing = PairingNorm::Kind::BlockDiag;
  bool force = false;
};

struct VerifyOptions {
  std::string suite = "all";  // sylvester | perturb | sintheta | all
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::size_t max_dim = 8;
};

struct SinThetaOptions {
  std::string g, u1t, v1t, g1t;
  std::optional<std::string> u2, v2;
  NormKind norm = NormKind::Spectral;
};

struct GenOptions {
  std::string kind = "instance";  // instance | exhibit
  std::size_t m = 6, n = 5, r = 2;
  std::string profile = "interval";  // interval | interleaved
  double gap = 1.0;
  double scale = 0.05;
  double ratio = 0.1;
  std::uint64_t seed = 0;
  std::string dir;
};

CommandResult cmd_bound(const BoundOptions& o);
CommandResult cmd_verify(const VerifyOptions& o);
CommandResult cmd_sintheta(const SinThetaOptions& o);
CommandResult cmd_gen(const GenOptions& o);

/// Report skeleton shared by every command.
Json report_header(const std::string& command);

/// Machine-readable error object; kind follows svdpert::Error::kind().
Json error_report(const std::string& command, const std::string& kind, const std::string& message);

}  // namespace svdpert::cli
