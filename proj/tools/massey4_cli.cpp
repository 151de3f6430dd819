// massey4: JSON-lines front end.
//
//   massey4 [flags] < jobs.jsonl          one result line per job line
//   massey4 [flags] conic a=3 b=5         a single job built from key=value pairs

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "massey4/jobs.hpp"

namespace {

// Values starting with '[', '{' or being true/false are read as JSON; everything else is a string.
massey4::Json payload_from_pairs(const std::vector<std::string>& pairs) {
  massey4::Json payload = massey4::Json::object();
  for (const std::string& kv : pairs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("expected key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    if (!value.empty() && (value[0] == '[' || value[0] == '{' || value == "true" || value == "false")) {
      payload[key] = massey4::Json::parse(value);
    } else {
      payload[key] = value;
    }
  }
  return payload;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourfold Massey products over Q: symbols, conics, norm equations and vanishing witnesses"};
  massey4::JobDefaults defaults;
  unsigned jobs = 1;
  std::string command;
  std::vector<std::string> pairs;
  app.add_option("--budget", defaults.config.budget, "search budget")->check(CLI::PositiveNumber);
  app.add_option("--precision-cap", defaults.config.precision_cap, "largest p-adic precision exponent")
      ->check(CLI::PositiveNumber);
  app.add_option("--factor-bound", defaults.config.factor_digits, "largest cofactor (decimal digits) to factor")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", defaults.config.seed, "seed for randomized factoring");
  app.add_flag("--trace", defaults.trace, "include intermediate pipeline data");
  app.add_option("--jobs", jobs, "worker threads for batch input")->check(CLI::PositiveNumber);
  app.add_option("command", command,
                 "symbol | conic | norm-eq | defined-check | witness | verify | specialize | residues | local-inv");
  app.add_option("payload", pairs, "key=value payload fields");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : massey4::kExitInvalid;
  }

  if (command.empty()) return massey4::run_stream(std::cin, std::cout, defaults, jobs);

  massey4::Json job{{"command", command}};
  try {
    job["payload"] = payload_from_pairs(pairs);
  } catch (const std::exception& e) {
    std::cerr << "massey4: " << e.what() << '\n';
    return massey4::kExitInvalid;
  }
  const massey4::JobResult r = massey4::run_job(job, defaults);
  std::cout << r.document.dump() << '\n';
  return r.exit_code;
}
