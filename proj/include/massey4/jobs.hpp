#pragma once

// Line-delimited JSON jobs: {"command": ..., "payload": {...}, "config": {...}}.

#include <iosfwd>
#include <string>

#include "massey4/arith.hpp"
#include "json.hpp"

namespace massey4 {

using Json = nlohmann::ordered_json;

struct JobDefaults {
  Config config;
  bool trace = false;
};

enum ExitCode : int { kExitOk = 0, kExitNegative = 1, kExitBudget = 2, kExitInvalid = 3 };

struct JobResult {
  int exit_code = kExitOk;
  Json document;
};

/// Runs one job; never throws. The document carries the effective configuration.
JobResult run_job(const Json& job, const JobDefaults& defaults);
JobResult run_job_line(const std::string& line, const JobDefaults& defaults);

/// Reads jobs from `in`, writes one result line per non-empty input line in input order.
/// Returns the largest exit code seen.
int run_stream(std::istream& in, std::ostream& out, const JobDefaults& defaults, unsigned threads);

}  // namespace massey4
