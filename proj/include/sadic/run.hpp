#pragma once

#include <ostream>

#include <json.hpp>

#include "sadic/config.hpp"

namespace sadic {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitInconclusive = 2 };

struct RunResult {
  int exit_code = kExitOk;
  nlohmann::json summary;           // also written to <out>/summary.json
  std::vector<std::string> files;   // written paths, summary first
};

/// Dispatches the configured task, writes summary.json and any CSVs into
/// cfg.out and returns the exit code: 0 success, 2 inconclusive verdict,
/// 1 error (with the message on `err`).
RunResult run(const RunConfig& cfg, std::ostream& err);

}  // namespace sadic
