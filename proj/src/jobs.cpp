#include "massey4/jobs.hpp"

#include <algorithm>
#include <atomic>
#include <istream>
#include <ostream>
#include <thread>
#include <vector>

#include "massey4/brauer.hpp"
#include "massey4/conics.hpp"
#include "massey4/funcfield.hpp"
#include "massey4/localfields.hpp"
#include "massey4/massey.hpp"
#include "massey4/qforms.hpp"

namespace massey4 {
namespace {

// Payload does not match the command's schema.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A mathematical negative answer with an obstruction, reported with exit code 1.
struct Negative {
  Json result;
};

const Json& field(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
  return obj.at(key);
}

Rat parse_rat(const Json& v, const char* what) {
  if (v.is_number_integer()) return Rat(v.dump());
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const MathError&) {
    }
  }
  throw SchemaError(std::string(what) + ": expected an integer or a rational string \"p/q\"");
}

Rat nonzero_rat(const Json& v, const char* what) {
  Rat q = parse_rat(v, what);
  if (q == 0) throw SchemaError(std::string(what) + " must be nonzero");
  return q;
}

SquareClass square_class_field(const Json& obj, const char* key) {
  return squarefree_class(nonzero_rat(field(obj, key), key));
}

EtaleAlgebra algebra_field(const Json& obj, const char* key = "algebra") {
  if (!obj.contains(key)) return EtaleAlgebra();
  const Json& v = obj.at(key);
  if (!v.is_array()) throw SchemaError(std::string(key) + ": expected an array of generators");
  std::vector<SquareClass> gens;
  for (const Json& g : v) gens.push_back(squarefree_class(nonzero_rat(g, key)));
  return EtaleAlgebra(gens);
}

EtaleElement parse_element(const Json& v, const EtaleAlgebra& E, const char* what) {
  if (!v.is_array()) return E.scalar(parse_rat(v, what));
  if (v.size() != E.dim()) {
    throw SchemaError(std::string(what) + ": expected " + std::to_string(E.dim()) + " coordinates");
  }
  std::vector<Rat> coords;
  for (const Json& c : v) coords.push_back(parse_rat(c, what));
  return E.from_coords(std::move(coords));
}

EtaleElement unit_field(const Json& obj, const char* key, const EtaleAlgebra& E) {
  EtaleElement x = parse_element(field(obj, key), E, key);
  if (!x.is_unit()) throw SchemaError(std::string(key) + " is not a unit");
  return x;
}

Json emit(const Rat& q) { return to_string(q); }
Json emit(const Int& n) { return n.get_str(); }
Json emit(const SquareClass& s) { return s.rep().get_str(); }
Json emit(const EtaleElement& x) {
  Json out = Json::array();
  for (const Rat& c : x.coords()) out.push_back(to_string(c));
  return out;
}
Json emit_algebra(const EtaleAlgebra& E) {
  Json out = Json::array();
  for (const SquareClass& g : E.generators()) out.push_back(emit(g));
  return out;
}
Json emit_places(const BrauerClass2& B) {
  Json out = Json::array();
  for (const LocalPlace& v : B.support()) out.push_back(v.str());
  return out;
}
Json emit_class(const BrauerClass2& B) {
  return Json{{"zero", B.is_zero()}, {"ramified", emit_places(B)}};
}
std::string place_name(const Int& p) { return p == 0 ? "inf" : "p=" + p.get_str(); }

// Polynomials: [[i, j, coefficient], ...] for coefficient x1^i x2^j.
BivariatePoly parse_poly(const Json& v, const EtaleAlgebra& K, const char* what) {
  if (!v.is_array()) throw SchemaError(std::string(what) + ": expected a list of [i, j, coefficient] terms");
  BivariatePoly p(K);
  for (const Json& t : v) {
    if (!t.is_array() || t.size() != 3 || !t[0].is_number_unsigned() || !t[1].is_number_unsigned()) {
      throw SchemaError(std::string(what) + ": bad term " + t.dump());
    }
    const BivariatePoly mono = BivariatePoly::x1(K).pow(t[0].get<unsigned>()) * BivariatePoly::x2(K).pow(t[1].get<unsigned>());
    p = p + mono * parse_element(t[2], K, what);
  }
  return p;
}

// A polynomial, or {"num": poly, "den": poly}.
BivariateRat parse_function(const Json& v, const EtaleAlgebra& K, const char* what) {
  if (v.is_object()) {
    BivariatePoly den = parse_poly(field(v, "den"), K, what);
    if (den.is_zero()) throw SchemaError(std::string(what) + ": zero denominator");
    return BivariateRat(parse_poly(field(v, "num"), K, what), den);
  }
  return BivariateRat(parse_poly(v, K, what));
}

MasseyInputs inputs_field(const Json& p) {
  const Rat a = nonzero_rat(field(p, "a"), "a"), b = nonzero_rat(field(p, "b"), "b");
  const Rat c = nonzero_rat(field(p, "c"), "c"), d = nonzero_rat(field(p, "d"), "d");
  return normalize_inputs(a, b, c, d);
}

Json emit_inputs(const MasseyInputs& in) {
  return Json{{"a", emit(in.a)}, {"b", emit(in.b)}, {"c", emit(in.c)}, {"d", emit(in.d)}};
}

Json emit_report(const CertificateReport& r) {
  return Json{{"ok", r.ok}, {"failed", r.failed}, {"symbol", emit_class(r.symbol)}};
}

// ---- commands ----

Json cmd_symbol(const Json& p) {
  const EtaleAlgebra E = algebra_field(p);
  const BrauerClass2 B = symbol(unit_field(p, "pi", E), unit_field(p, "rho", E));
  Json primes = Json::array();
  for (const Int& q : B.primes()) primes.push_back(place_name(q));
  Json out{{"algebra", emit_algebra(E)}, {"class", emit_class(B)}, {"primes", primes}};
  return out;
}

Json cmd_local_inv(const Json& p) {
  const EtaleAlgebra E = algebra_field(p);
  const EtaleElement pi = unit_field(p, "pi", E), rho = unit_field(p, "rho", E);
  std::vector<Int> primes;
  if (p.contains("prime")) {
    const Rat q = parse_rat(p.at("prime"), "prime");
    if (q.get_den() != 1 || q < 0 || (q > 0 && !is_probable_prime(q.get_num()))) {
      throw SchemaError("prime must be a rational prime or 0 for infinity");
    }
    primes.push_back(q.get_num());
  } else {
    primes = symbol_support(pi, rho);
  }
  Json places = Json::array();
  int product = 1;
  for (const Int& q : primes) {
    for (const LocalPlace& v : places_above(E, q)) {
      const int s = local_symbol(E, v, pi, rho);
      product *= s;
      places.push_back(Json{{"place", v.str()}, {"symbol", s}});
    }
  }
  Json out{{"algebra", emit_algebra(E)}, {"places", places}};
  if (!p.contains("prime")) out["product"] = product;
  return out;
}

Json cmd_conic(const Json& p) {
  const Rat a = nonzero_rat(field(p, "a"), "a"), b = nonzero_rat(field(p, "b"), "b");
  const ConicResult r = solve_conic(a, b);
  Json out{{"equation", "z^2 = a x^2 + b y^2"}, {"a", emit(a)}, {"b", emit(b)}};
  if (!r.solution) {
    out["solvable"] = false;
    out["obstruction"] = place_name(*r.obstruction);
    throw Negative{out};
  }
  out["solvable"] = true;
  out["solution"] = Json{{"x", emit(r.solution->x)}, {"y", emit(r.solution->y)}, {"z", emit(r.solution->z)}};
  return out;
}

Json cmd_norm_eq(const Json& p) {
  const EtaleAlgebra E = algebra_field(p);
  if (E.num_generators() == 0) throw SchemaError("algebra needs at least one generator");
  const EtaleAlgebra base = E.prefix(E.num_generators() - 1);
  const EtaleElement t = unit_field(p, "t", base);
  Json out{{"algebra", emit_algebra(E)}, {"t", emit(t)}};
  try {
    const EtaleElement xi = solve_norm_equation(E, t);
    out["solvable"] = true;
    out["xi"] = emit(xi);
    out["norm"] = emit(norm(xi, E.num_generators() - 1));
  } catch (const MathError& e) {
    if (e.kind() != ErrorKind::NoSolution) throw;
    out["solvable"] = false;
    out["obstruction"] = e.what();
    throw Negative{out};
  }
  return out;
}

Json emit_certificate(const DefinedCertificate& c) {
  return Json{{"alpha", emit(c.alpha)}, {"delta", emit(c.delta)}};
}

Json cmd_defined_check(const Json& p, const Config& cfg) {
  const MasseyInputs in = inputs_field(p);
  Json out = emit_inputs(in);
  if (p.contains("alpha") || p.contains("delta")) {
    const EtaleElement alpha = unit_field(p, "alpha", quadratic_algebra(in.a));
    const EtaleElement delta = unit_field(p, "delta", quadratic_algebra(in.d));
    const CertificateReport r = check_defined_certificate(in, alpha, delta);
    out["report"] = emit_report(r);
    if (!r.ok) throw Negative{out};
    return out;
  }
  const SearchOutcome s = search_defined_certificate(in, cfg.budget);
  out["tried"] = s.tried;
  if (s.certificate) {
    out["certificate"] = emit_certificate(*s.certificate);
    return out;
  }
  if (s.obstruction) {
    out["obstruction"] = *s.obstruction;
    throw Negative{out};
  }
  throw MathError(ErrorKind::SearchBoundExceeded, "no certificate within budget " + std::to_string(cfg.budget));
}

Json emit_trace(const Witness& w) {
  Json t{{"c_exact", emit(w.c_exact)}, {"y", emit(w.y)}};
  if (w.used) t["certificate"] = emit_certificate(*w.used);
  if (w.x_nu) {
    const XNuTrace& tr = w.x_nu->trace;
    t["alpha1"] = emit(tr.alpha1);
    t["alpha2"] = emit(tr.alpha2);
    t["u1"] = emit(tr.u1);
    t["u2"] = emit(tr.u2);
    t["dependent"] = tr.dependent;
    t["x"] = emit(w.x_nu->x);
    t["nu"] = emit(w.x_nu->nu);
    if (!tr.dependent) {
      t["p0"] = Json::array({emit(tr.p0[0]), emit(tr.p0[1])});
      t["eta"] = emit(tr.eta);
      t["point"] = Json::array({emit(tr.point[0]), emit(tr.point[1])});
      t["swapped"] = tr.swapped;
      t["x_value"] = emit(tr.x_value);
      t["nu_value"] = emit(tr.nu_value);
    }
  }
  return t;
}

Json cmd_witness(const Json& p, const Config& cfg, bool trace) {
  const MasseyInputs in = inputs_field(p);
  std::optional<DefinedCertificate> cert;
  if (p.contains("alpha") || p.contains("delta")) {
    cert = DefinedCertificate{in, unit_field(p, "alpha", quadratic_algebra(in.a)),
                              unit_field(p, "delta", quadratic_algebra(in.d))};
    const CertificateReport r = check_defined_certificate(in, cert->alpha, cert->delta);
    if (!r.ok) {
      Json out = emit_inputs(in);
      out["report"] = emit_report(r);
      throw Negative{out};
    }
  } else if (!in.c.is_trivial()) {
    const SearchOutcome s = search_defined_certificate(in, cfg.budget);
    if (!s.certificate) {
      Json out = emit_inputs(in);
      out["tried"] = s.tried;
      if (!s.obstruction) throw MathError(ErrorKind::SearchBoundExceeded, "no certificate within budget");
      out["obstruction"] = *s.obstruction;
      throw Negative{out};
    }
    cert = s.certificate;
  } else {
    const BrauerClass2 ab = symbol(Rat(in.a.rep()), Rat(in.b.rep()));
    if (!ab.is_zero()) {
      Json out = emit_inputs(in);
      out["obstruction"] = "(a,b) ramified at " + place_name(ab.primes().front());
      throw Negative{out};
    }
  }
  const Witness w = vanish_witness(in, cert, cfg.budget);
  Json out = emit_inputs(in);
  out["alpha"] = emit(w.alpha);
  out["delta"] = emit(w.delta);
  out["branch"] = w.branch;
  if (w.certificate) {
    out["certificate"] = Json{{"p", emit(w.certificate->p)}, {"q", emit(w.certificate->q)}};
  } else {
    out["certificate"] = nullptr;
  }
  if (trace) out["trace"] = emit_trace(w);
  return out;
}

Json cmd_verify(const Json& p) {
  const MasseyInputs in = inputs_field(p);
  const EtaleElement alpha = unit_field(p, "alpha", quadratic_algebra(in.a));
  const EtaleElement delta = unit_field(p, "delta", quadratic_algebra(in.d));
  const CertificateReport r = check_vanish_certificate(in, alpha, delta);
  Json out = emit_inputs(in);
  out["report"] = emit_report(r);
  bool ok = r.ok;
  if (p.contains("certificate") && !p.at("certificate").is_null()) {
    const Json& c = p.at("certificate");
    const EtaleAlgebra Fad = biquadratic_algebra(in.a, in.d);
    Witness w;
    w.in = in;
    w.alpha = alpha;
    w.delta = delta;
    w.certificate = NormCertificate{parse_element(field(c, "p"), Fad, "p"), parse_element(field(c, "q"), Fad, "q")};
    const bool cert_ok = verify_norm_certificate(w);
    out["certificate_ok"] = cert_ok;
    ok = ok && cert_ok;
  }
  out["ok"] = ok;
  if (!ok) throw Negative{out};
  return out;
}

Json cmd_specialize(const Json& p) {
  const EtaleAlgebra K = algebra_field(p);
  const Json& pt = field(p, "point");
  if (!pt.is_array() || pt.size() != 2) throw SchemaError("point: expected [p1, p2]");
  ParamSystem ps{parse_rat(pt[0], "point"), parse_rat(pt[1], "point"), false};
  if (p.contains("swapped")) {
    if (!p.at("swapped").is_boolean()) throw SchemaError("swapped: expected a boolean");
    ps.swapped = p.at("swapped").get<bool>();
  }
  const BivariateRat f = parse_function(field(p, "f"), K, "f");
  if (f.is_zero()) throw SchemaError("f is zero");
  Json out{{"algebra", emit_algebra(K)}, {"f", emit(specialize_class1(f, ps))}};
  if (p.contains("g")) {
    const BivariateRat g = parse_function(p.at("g"), K, "g");
    if (g.is_zero()) throw SchemaError("g is zero");
    out["g"] = emit(specialize_class1(g, ps));
    out["symbol"] = emit_class(specialize_class2(f, g, ps));
  }
  return out;
}

Json cmd_residues(const Json& p) {
  const SquareClass a = square_class_field(p, "a"), d = square_class_field(p, "d");
  const EtaleElement alpha = unit_field(p, "alpha", quadratic_algebra(a));
  const EtaleElement delta = unit_field(p, "delta", quadratic_algebra(d));
  const Rat c = norm_to_q(delta);
  const auto [a1, a2] = split_alpha(a, c, alpha);
  Json checks = Json::array();
  bool ok = true;
  for (const ResidueCheck& r : pipeline_residue_checks(a, c, d, a1, a2, delta.coord(0))) {
    checks.push_back(Json{{"label", r.label}, {"divisor", r.divisor}, {"residue", r.residue},
                          {"expected", r.expected}, {"ok", r.ok}});
    ok = ok && r.ok;
  }
  Json out{{"a", emit(a)}, {"c", emit(c)}, {"d", emit(d)}, {"alpha1", emit(a1)}, {"alpha2", emit(a2)},
           {"checks", checks}, {"ok", ok}};
  if (!ok) throw Negative{out};
  return out;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput:
    case ErrorKind::PreconditionFailed:
    case ErrorKind::NotAUnit:
    case ErrorKind::AlgebraMismatch:
    case ErrorKind::ZeroDivisorOnRestriction:
      return kExitInvalid;
    case ErrorKind::NoSolution:
    case ErrorKind::NotSplitByFa:
      return kExitNegative;
    default:
      return kExitBudget;
  }
}

Config parse_config(const Json& job, const JobDefaults& defaults, bool& trace) {
  Config cfg = defaults.config;
  trace = defaults.trace;
  if (!job.contains("config")) return cfg;
  const Json& c = job.at("config");
  if (!c.is_object()) throw SchemaError("config: expected an object");
  auto positive = [&](const char* key) -> std::uint64_t {
    const Json& v = c.at(key);
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) {
      throw SchemaError(std::string("config.") + key + ": expected a positive integer");
    }
    return v.get<std::uint64_t>();
  };
  for (const auto& [key, value] : c.items()) {
    if (key == "budget") {
      cfg.budget = positive("budget");
    } else if (key == "precision_cap") {
      cfg.precision_cap = static_cast<int>(std::min<std::uint64_t>(positive("precision_cap"), 1u << 20));
    } else if (key == "factor_bound") {
      cfg.factor_digits = static_cast<int>(std::min<std::uint64_t>(positive("factor_bound"), 10000));
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) throw SchemaError("config.seed: expected a nonnegative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "trace") {
      if (!value.is_boolean()) throw SchemaError("config.trace: expected a boolean");
      trace = value.get<bool>();
    } else {
      throw SchemaError("config: unknown key '" + key + "'");
    }
  }
  return cfg;
}

Json emit_config(const Config& cfg, bool trace) {
  return Json{{"budget", cfg.budget},           {"precision_cap", cfg.precision_cap},
              {"factor_bound", cfg.factor_digits}, {"rho_iterations", cfg.rho_iterations},
              {"seed", cfg.seed},               {"trace", trace}};
}

}  // namespace

JobResult run_job(const Json& job, const JobDefaults& defaults) {
  JobResult res;
  Json& doc = res.document;
  Config cfg = defaults.config;
  bool trace = defaults.trace;
  std::string command;
  auto fail = [&](int code, const std::string& status, const std::string& kind, const std::string& message) {
    res.exit_code = code;
    doc["status"] = status;
    doc["error"] = Json{{"kind", kind}, {"message", message}};
  };
  try {
    if (!job.is_object()) throw SchemaError("job must be a JSON object");
    const Json& cmd = field(job, "command");
    if (!cmd.is_string()) throw SchemaError("command: expected a string");
    command = cmd.get<std::string>();
    doc["command"] = command;
    cfg = parse_config(job, defaults, trace);
    const Json payload = job.contains("payload") ? job.at("payload") : Json::object();
    if (!payload.is_object()) throw SchemaError("payload: expected an object");

    // Each job starts from the same factoring state, so its output does not depend on earlier jobs.
    clear_factor_hints();
    ScopedConfig scope(cfg);
    Json result;
    try {
      if (command == "symbol") result = cmd_symbol(payload);
      else if (command == "local-inv") result = cmd_local_inv(payload);
      else if (command == "conic") result = cmd_conic(payload);
      else if (command == "norm-eq") result = cmd_norm_eq(payload);
      else if (command == "defined-check") result = cmd_defined_check(payload, cfg);
      else if (command == "witness") result = cmd_witness(payload, cfg, trace);
      else if (command == "verify") result = cmd_verify(payload);
      else if (command == "specialize") result = cmd_specialize(payload);
      else if (command == "residues") result = cmd_residues(payload);
      else throw SchemaError("unknown command '" + command + "'");
      doc["status"] = "ok";
      doc["result"] = std::move(result);
    } catch (Negative& n) {
      res.exit_code = kExitNegative;
      doc["status"] = "negative";
      doc["result"] = std::move(n.result);
    }
  } catch (const SchemaError& e) {
    fail(kExitInvalid, "invalid", "InvalidInput", e.what());
  } catch (const MathError& e) {
    const int code = exit_code_for(e.kind());
    fail(code, code == kExitInvalid ? "invalid" : code == kExitNegative ? "negative" : "budget",
         to_string(e.kind()), e.what());
  } catch (const Json::exception& e) {
    fail(kExitInvalid, "invalid", "InvalidInput", e.what());
  } catch (const std::exception& e) {
    fail(kExitBudget, "error", "Internal", e.what());
  }
  doc["exit_code"] = res.exit_code;
  doc["config"] = emit_config(cfg, trace);
  return res;
}

JobResult run_job_line(const std::string& line, const JobDefaults& defaults) {
  Json job;
  try {
    job = Json::parse(line);
  } catch (const Json::parse_error& e) {
    JobResult res;
    res.exit_code = kExitInvalid;
    res.document = Json{{"status", "invalid"},
                        {"error", Json{{"kind", "InvalidInput"}, {"message", e.what()}}},
                        {"exit_code", kExitInvalid},
                        {"config", emit_config(defaults.config, defaults.trace)}};
    return res;
  }
  return run_job(job, defaults);
}

int run_stream(std::istream& in, std::ostream& out, const JobDefaults& defaults, unsigned threads) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
  }
  std::vector<JobResult> results(lines.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < lines.size();) results[i] = run_job_line(lines[i], defaults);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(lines.size())));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  int code = kExitOk;
  for (const JobResult& r : results) {
    out << r.document.dump() << '\n';
    code = std::max(code, r.exit_code);
  }
  return code;
}

}  // namespace massey4
