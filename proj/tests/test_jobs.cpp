#include <sstream>

#include "doctest.h"
#include "massey4/jobs.hpp"

using namespace massey4;

namespace {

JobResult run(const std::string& line) { return run_job_line(line, JobDefaults{}); }

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run(R"({"command":"conic","payload":{"a":"2","b":"7"}})").exit_code == kExitOk);
  const JobResult neg = run(R"({"command":"conic","payload":{"a":"3","b":"5"}})");
  CHECK(neg.exit_code == kExitNegative);
  CHECK(neg.document["result"]["obstruction"] == "p=3");
  CHECK(run("{not json").exit_code == kExitInvalid);
  CHECK(run(R"({"command":"nope"})").exit_code == kExitInvalid);
  CHECK(run(R"({"command":"conic","payload":{"a":"0","b":"5"}})").exit_code == kExitInvalid);
  CHECK(run(R"({"command":"conic","payload":{"a":"2","b":"7"},"config":{"bogus":1}})").exit_code == kExitInvalid);
  CHECK(run(R"({"command":"symbol","payload":{"algebra":["2"],"pi":["0","0"],"rho":"3"}})").exit_code ==
        kExitInvalid);
}

TEST_CASE("config overrides are echoed") {
  const JobResult r = run(R"({"command":"conic","payload":{"a":"2","b":"7"},"config":{"budget":17,"seed":9}})");
  CHECK(r.document["config"]["budget"] == 17);
  CHECK(r.document["config"]["seed"] == 9);
  CHECK(r.document["exit_code"] == 0);
}

TEST_CASE("symbol and local invariants") {
  const JobResult s = run(R"({"command":"symbol","payload":{"algebra":[],"pi":"-1","rho":"-1"}})");
  REQUIRE(s.exit_code == kExitOk);
  const Json& primes = s.document["result"]["primes"];
  CHECK(primes.size() == 2);
  const JobResult l = run(R"({"command":"local-inv","payload":{"algebra":["5"],"pi":["1","1"],"rho":"3"}})");
  REQUIRE(l.exit_code == kExitOk);
  CHECK(l.document["result"]["product"] == 1);
}

TEST_CASE("witness round trip through verify") {
  for (const char* line : {R"({"command":"witness","payload":{"a":"2","b":"-1","c":"2","d":"-1"}})",
                           R"({"command":"witness","payload":{"a":"7","b":"2","c":"-7","d":"2"}})",
                           R"({"command":"witness","payload":{"a":"2","b":"7","c":"1","d":"5"}})"}) {
    const JobResult w = run(line);
    INFO(w.document.dump());
    REQUIRE(w.exit_code == kExitOk);
    const Json& r = w.document["result"];
    Json payload = Json::object();
    for (const char* k : {"a", "b", "c", "d", "alpha", "delta", "certificate"}) payload[k] = r[k];
    const JobResult v = run_job(Json{{"command", "verify"}, {"payload", payload}}, JobDefaults{});
    INFO(v.document.dump());
    CHECK(v.exit_code == kExitOk);
    CHECK(v.document["result"]["ok"] == true);
  }
}

TEST_CASE("verify rejects a wrong witness") {
  const JobResult v = run(R"({"command":"verify","payload":{"a":"2","b":"7","c":"1","d":"3","alpha":"1","delta":"1"}})");
  CHECK(v.exit_code == kExitNegative);
}

TEST_CASE("streams are deterministic and ordered") {
  const std::string input =
      R"({"command":"witness","payload":{"a":"5","b":"-1","c":"5","d":"-1"}})"
      "\n\n"
      R"({"command":"conic","payload":{"a":"3","b":"5"}})"
      "\n"
      R"({"command":"defined-check","payload":{"a":"2","b":"-1","c":"2","d":"-1"}})"
      "\n"
      R"({"command":"conic","payload":{"a":"-1","b":"2"}})"
      "\n";
  std::string first;
  for (unsigned threads : {1u, 4u, 1u, 3u}) {
    std::istringstream in(input);
    std::ostringstream out;
    const int code = run_stream(in, out, JobDefaults{}, threads);
    CHECK(code == kExitNegative);
    if (first.empty()) first = out.str();
    CHECK(out.str() == first);
  }
  std::istringstream lines(first);
  std::vector<std::string> cmds;
  for (std::string l; std::getline(lines, l);) cmds.push_back(Json::parse(l)["command"]);
  CHECK(cmds == std::vector<std::string>{"witness", "conic", "defined-check", "conic"});
}
