// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "generators.hpp"
#include "massey4/conics.hpp"
#include "massey4/funcfield.hpp"
#include "massey4/localfields.hpp"
#include "massey4/qforms.hpp"

using namespace massey4;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

SquareClass sc(long n) { return squarefree_class(Rat(n)); }

std::vector<long> squarefree_range(long lo, long hi) {
  std::vector<long> out;
  for (long n = lo; n <= hi; ++n) {
    if (n == 0) continue;
    bool ok = true;
    for (long p = 2; p * p <= std::labs(n); ++p) ok = ok && n % (p * p) != 0;
    if (ok) out.push_back(n);
  }
  return out;
}

std::string fmt(const char* f, long x, long y = 0, long z = 0, long w = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, x, y, z, w);
  return buf;
}

struct Rng {
  std::mt19937 eng;
  explicit Rng(unsigned seed) : eng(seed) {}
  long ri(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(eng); }
  Rat nonzero_rat(long bound) {
    long n;
    do n = ri(-bound, bound); while (n == 0);
    Rat q(n, ri(1, bound));
    q.canonicalize();
    return q;
  }
};

// 1. Reciprocity over the support plus 2 and infinity; closed formulas against the norm search.
Outcome hilbert_reciprocity() {
  Rng g(101);
  long bad_product = 0, mismatch = 0, checked_places = 0;
  for (int it = 0; it < 10000; ++it) {
    const Rat a = g.nonzero_rat(1000), b = g.nonzero_rat(1000);
    std::set<Int> places{0, 2};
    for (const Rat& x : {a, b}) {
      for (const Int& p : prime_support(x)) places.insert(p);
    }
    int product = 1;
    for (const Int& p : places) {
      const int s = hilbert_symbol_qp(a, b, p);
      product *= s;
      ++checked_places;
      if (hilbert_symbol_qp_by_norms(a, b, p) != s) ++mismatch;
    }
    if (product != 1) ++bad_product;
  }
  return {bad_product == 0 && mismatch == 0,
          fmt("10000 pairs, %ld places; product != 1: %ld, norm-search mismatches: %ld", checked_places,
              bad_product, mismatch)};
}

// 2. Conic solvable iff the Brauer class vanishes, for all squarefree |a|, |b| <= 50.
Outcome conic_equivalence() {
  const std::vector<long> sf = squarefree_range(-50, 50);
  long pairs = 0, disagree = 0, bad_solution = 0;
  for (long a : sf) {
    for (long b : sf) {
      ++pairs;
      const ConicResult r = solve_conic(a, b);
      const bool zero = symbol(Rat(a), Rat(b)).is_zero();
      if (r.solution.has_value() != zero) ++disagree;
      if (r.solution) {
        const ConicSolution& s = *r.solution;
        const bool nontrivial = s.x != 0 || s.y != 0 || s.z != 0;
        if (!nontrivial || s.z * s.z != a * s.x * s.x + b * s.y * s.y) ++bad_solution;
      }
    }
  }
  return {disagree == 0 && bad_solution == 0,
          fmt("%ld pairs; solvability disagreements: %ld, bad solutions: %ld", pairs, disagree, bad_solution)};
}

// 3. Residues of B = (alpha f, g) + (d, h) on random pipeline states.
Outcome residue_suite() {
  testing::CertificateGenerator gen(303);
  long states = 0, checks = 0, failed = 0, dependent = 0, skipped = 0;
  std::string first_failure;
  while (states < 220) {
    const DefinedCertificate cert = gen.next();
    const Rat c = norm_to_q(cert.delta), u1 = cert.delta.coord(0);
    if (u1 * u1 == c) continue;
    std::pair<EtaleElement, EtaleElement> split;
    try {
      split = split_alpha(cert.in.a, c, cert.alpha);
    } catch (const MathError& e) {
      if (e.kind() != ErrorKind::FactorizationBoundExceeded) throw;
      ++skipped;
      continue;
    }
    const auto& [a1, a2] = split;
    if (a1.coord(0) * a2.coord(1) == a1.coord(1) * a2.coord(0)) {
      ++dependent;
      continue;
    }
    ++states;
    for (const ResidueCheck& r : pipeline_residue_checks(cert.in.a, c, cert.in.d, a1, a2, u1)) {
      ++checks;
      if (!r.ok) {
        ++failed;
        if (first_failure.empty()) first_failure = " first: " + r.label + " at " + r.divisor;
      }
    }
  }
  return {failed == 0 && states >= 200,
          fmt("%ld states, %ld residue checks, %ld failed (dependent skipped: %ld, ", states, checks, failed,
              dependent) +
              fmt("unfactorable skipped: %ld)", skipped) + first_failure};
}

// 4. Specialization at regular points, multiplicativity, corestriction compatibility.
Outcome specialization_laws() {
  Rng g(404);
  const std::vector<long> as{2, -1, 3, 5, -7, 6, -3, 1};
  auto coef = [&](const EtaleAlgebra& K) {
    std::vector<Rat> c(K.dim());
    for (Rat& x : c) x = g.ri(-6, 6);
    return K.from_coords(c);
  };
  auto poly = [&](const EtaleAlgebra& K, const Rat& p1, const Rat& p2, bool through) {
    EtaleElement k;
    do k = coef(K); while (!k.is_unit());
    BivariatePoly f = BivariatePoly::constant(k);
    const long lines = g.ri(1, 3);
    for (long i = 0; i < lines; ++i) {
      const EtaleElement l1 = coef(K), l2 = coef(K);
      if (l1.is_zero() && l2.is_zero()) continue;
      const EtaleElement l0 = through && g.ri(0, 1) ? -(l1 * p1 + l2 * p2) : coef(K);
      f = f * BivariatePoly::linear(l0, l1, l2);
    }
    return f;
  };
  auto same_class = [](const EtaleElement& x, const EtaleElement& y) { return is_square_with_witness(x * y).is_square; };
  auto nonzero_each = [](const BivariatePoly& f) {
    for (std::size_t k = 0; k < f.algebra().num_components(); ++k) {
      if (f.to_component(k).is_zero()) return false;
    }
    return true;
  };

  long regular = 0, regular_fail = 0, mult = 0, mult_fail = 0, cores = 0, cores_fail = 0;
  while (regular < 1000) {
    const EtaleAlgebra Fa = quadratic_algebra(sc(as[g.ri(0, as.size() - 1)]));
    const Rat p1 = g.ri(-4, 4), p2 = g.ri(-4, 4);
    const BivariatePoly f = poly(Fa, p1, p2, false);
    if (!f.evaluate(p1, p2).is_unit()) continue;
    ++regular;
    const ParamSystem ps{p1, p2, g.ri(0, 1) == 1};
    if (!same_class(specialize_class1(BivariateRat(f), ps), f.evaluate(p1, p2))) ++regular_fail;
  }
  while (mult < 1000) {
    const EtaleAlgebra Fa = quadratic_algebra(sc(as[g.ri(0, as.size() - 1)]));
    const Rat p1 = g.ri(-4, 4), p2 = g.ri(-4, 4);
    const BivariatePoly f = poly(Fa, p1, p2, true), h = poly(Fa, p1, p2, true);
    if (!nonzero_each(f * h)) continue;
    ++mult;
    const ParamSystem ps{p1, p2, g.ri(0, 1) == 1};
    const EtaleElement sf = specialize_class1(BivariateRat(f), ps), sh = specialize_class1(BivariateRat(h), ps);
    const bool ok = same_class(specialize_class1(BivariateRat(f * h), ps), sf * sh) &&
                    same_class(specialize_class1(BivariateRat(f, h), ps), sf * sh);
    if (!ok) ++mult_fail;
  }
  const EtaleAlgebra Q;
  while (cores < 1000) {
    const EtaleAlgebra Fa = quadratic_algebra(sc(as[g.ri(0, as.size() - 2)]));
    const Rat p1 = g.ri(-4, 4), p2 = g.ri(-4, 4);
    const BivariatePoly f = poly(Fa, p1, p2, true), r = poly(Q, p1, p2, true);
    if (!nonzero_each(f)) continue;
    ++cores;
    const BivariatePoly r_up = r.map(Fa, [&](const EtaleElement& x) { return Fa.scalar(x.coord(0)); });
    const BivariatePoly Nf = (f * f.conj(0)).map(Q, [&](const EtaleElement& x) { return Q.scalar(x.coord(0)); });
    const ParamSystem ps{p1, p2, g.ri(0, 1) == 1};
    const BrauerClass2 up = specialize_class2(BivariateRat(r_up), BivariateRat(f), ps);
    const BrauerClass2 down = specialize_class2(BivariateRat(r), BivariateRat(Nf), ps);
    if (corestriction(up, 0) != down) ++cores_fail;
  }
  return {regular_fail == 0 && mult_fail == 0 && cores_fail == 0,
          fmt("regular %ld/1000 failed, multiplicativity %ld/1000 failed, corestriction %ld/1000 failed",
              regular_fail, mult_fail, cores_fail)};
}

// 5. Albert step: y with (pi, mu y) = 0 when the corestriction vanishes, refusal otherwise.
Outcome albert_step() {
  Rng g(505);
  const std::vector<long> as{2, -1, 3, 5, -7, 6, -3, 10, 13, -5};
  long accepted = 0, refused = 0, failures = 0;
  while (accepted < 220 || refused < 60) {
    const SquareClass a = sc(as[g.ri(0, as.size() - 1)]);
    const EtaleAlgebra Fa = quadratic_algebra(a);
    const EtaleElement pi = Fa.from_coords({g.ri(-9, 9), g.ri(-9, 9)});
    const EtaleElement w1 = Fa.from_coords({g.ri(-6, 6), g.ri(-6, 6)}), w2 = Fa.from_coords({g.ri(-6, 6), g.ri(-6, 6)});
    // Half the triples are built so the corestriction vanishes.
    EtaleElement mu = Fa.from_coords({g.ri(-9, 9), g.ri(-9, 9)});
    if (g.ri(0, 1)) mu = (w1 * w1 - pi * w2 * w2) * Rat(g.ri(-12, 12));
    if (!pi.is_unit() || !mu.is_unit()) continue;
    const bool cores_zero = corestriction(symbol(pi, mu), 0).is_zero();
    if (cores_zero && accepted < 220) {
      ++accepted;
      try {
        const AlbertResult r = albert_solve(a, pi, mu);
        bool ok = symbol(pi, mu * Rat(r.y)).is_zero();
        if (r.zw) ok = ok && mu * (r.zw->first * r.zw->first - pi * r.zw->second * r.zw->second) == Fa.scalar(Rat(r.y));
        if (!ok) ++failures;
      } catch (const MathError&) {
        ++failures;
      }
    } else if (!cores_zero && refused < 60) {
      ++refused;
      try {
        albert_find_y(a, pi, mu);
        ++failures;
      } catch (const MathError&) {
      }
    }
  }
  return {failures == 0, fmt("%ld accepted, %ld refusals, %ld failures", accepted, refused, failures)};
}

// 6 and the second half of 7 share the generated certificates.
struct Suite6 {
  std::vector<DefinedCertificate> certs;
  std::vector<std::optional<Witness>> witnesses;
};

Suite6 make_suite6() {
  testing::CertificateGenerator gen(606);
  Suite6 s;
  for (int i = 0; i < 120; ++i) s.certs.push_back(gen.next());
  return s;
}

Outcome end_to_end(Suite6& s) {
  const auto t0 = std::chrono::steady_clock::now();
  long verified = 0, certified = 0, rejected = 0, errors = 0;
  std::string first_error;
  for (const DefinedCertificate& cert : s.certs) {
    try {
      Witness w = vanish_witness(cert.in, cert, config().budget);
      if (check_vanish_certificate(cert.in, w.alpha, w.delta).ok) {
        ++verified;
        if (w.certificate && verify_norm_certificate(w)) ++certified;
      } else {
        ++rejected;
      }
      s.witnesses.push_back(std::move(w));
    } catch (const MathError& e) {
      ++errors;
      if (first_error.empty()) first_error = std::string(" first error: ") + e.what();
      s.witnesses.push_back(std::nullopt);
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const long n = static_cast<long>(s.certs.size());
  const bool pass = rejected == 0 && certified * 10 >= n * 9 && secs < 600;
  return {pass, fmt("%ld certificates: %ld witnesses verified, %ld rejected, %ld budget errors; ", n, verified,
                    rejected, errors) +
                    fmt("%ld with explicit norm certificate (%ld%%), ", certified, certified * 100 / n) +
                    fmt("%ld s", static_cast<long>(secs)) + first_error};
}

// 7. c = 1: the c-square branch on (a, b, 1, d) and the general branch on the companion
// (a, b, N(delta), d) with N(delta) not a square; plus rescaling by squares on suite 6.
Outcome branch_consistency(const Suite6& s) {
  testing::CertificateGenerator gen(707);
  long c_square = 0, c_square_fail = 0, general = 0, general_fail = 0, budget = 0;
  while (c_square < 60) {
    const DefinedCertificate cert = gen.next();
    const MasseyInputs one{cert.in.a, cert.in.b, sc(1), cert.in.d};
    ++c_square;
    try {
      const Witness w = vanish_witness(one, std::nullopt, config().budget);
      if (w.branch != "c-square" || !check_vanish_certificate(one, w.alpha, w.delta).ok || !verify_norm_certificate(w)) {
        ++c_square_fail;
      }
    } catch (const MathError&) {
      ++c_square_fail;
    }
    ++general;
    try {
      const Witness w = general_branch_witness(cert);
      if (w.branch != "general" || !check_vanish_certificate(cert.in, w.alpha, w.delta).ok) ++general_fail;
    } catch (const MathError& e) {
      if (e.kind() == ErrorKind::FactorizationBoundExceeded) ++budget;
      else ++general_fail;
    }
  }

  Rng g(708);
  long scaled = 0, scale_fail = 0;
  for (std::size_t i = 0; i < s.certs.size(); ++i) {
    const DefinedCertificate& cert = s.certs[i];
    const Rat ra = Rat(g.ri(1, 12)), rb = Rat(g.ri(1, 12)), rd = Rat(g.ri(1, 12));
    Rat t(g.ri(1, 12), g.ri(1, 12));
    t.canonicalize();
    Rat u(g.ri(1, 12), g.ri(1, 12));
    u.canonicalize();
    // alpha * t^2 has norm b t^4 and delta * u^2 has norm c u^4.
    const MasseyInputs in = normalize_inputs(Rat(cert.in.a.rep()) * ra * ra, Rat(cert.in.b.rep()) * rb * rb,
                                             norm_to_q(cert.delta) * u * u, Rat(cert.in.d.rep()) * rd * rd);
    const EtaleElement alpha = cert.alpha * (t * t), delta = cert.delta * (u * u);
    ++scaled;
    bool ok = check_defined_certificate(in, alpha, delta).ok == check_defined_certificate(cert.in, cert.alpha, cert.delta).ok;
    if (const auto& w = s.witnesses[i]) {
      ok = ok && check_vanish_certificate(in, w->alpha * (t * t), w->delta * (u * u)).ok ==
                     check_vanish_certificate(cert.in, w->alpha, w->delta).ok;
    }
    if (!ok) ++scale_fail;
  }
  return {c_square_fail == 0 && general_fail == 0 && scale_fail == 0,
          fmt("c-square %ld/%ld failed, general %ld/%ld failed", c_square_fail, c_square, general_fail, general) +
              fmt(" (%ld budget errors); rescaling %ld/%ld failed", budget, scale_fail, scaled)};
}

// 8. chain_decompose and express_as_symbol certificates re-verify.
Outcome chain_and_express() {
  Rng g(808);
  const std::vector<long> sf = squarefree_range(-30, 30);
  auto pick = [&] { return sf[g.ri(0, sf.size() - 1)]; };
  auto norm_from = [&](long t) {
    for (;;) {
      const Rat x = g.ri(-20, 20), y = g.ri(-12, 12);
      if (const Rat n = x * x - Rat(t) * y * y; n != 0) return n;
    }
  };
  long chains = 0, chain_fail = 0;
  while (chains < 500) {
    const long a = pick(), b = pick();
    // u = n_a n_ab, v = n_b n_ab with each n_t a norm from F_t gives (a, u) = (b, v).
    const Rat n_ab = norm_from(a * b);
    const SquareClass u = squarefree_class(norm_from(a) * n_ab), v = squarefree_class(norm_from(b) * n_ab);
    ++chains;
    try {
      const ChainDecomposition ch = chain_decompose(sc(a), u, sc(b), v);
      const bool ok = norm_to_q(ch.xi_a) == Rat(ch.n_a) && norm_to_q(ch.xi_b) == Rat(ch.n_b) &&
                      norm_to_q(ch.xi_ab) == Rat(ch.n_ab) && squarefree_class(Rat(ch.n_a * ch.n_ab)) == u &&
                      squarefree_class(Rat(ch.n_b * ch.n_ab)) == v;
      if (!ok) ++chain_fail;
    } catch (const MathError&) {
      ++chain_fail;
    }
  }
  long exprs = 0, expr_fail = 0;
  while (exprs < 500) {
    const long a = pick();
    const BrauerClass2 A = symbol(Rat(pick()), Rat(pick())) + symbol(Rat(a), Rat(pick()));
    if (!restriction(A, quadratic_algebra(sc(a))).is_zero()) continue;
    ++exprs;
    try {
      const Int u = express_as_symbol(A, sc(a));
      if (symbol(Rat(a), Rat(u)) != A) ++expr_fail;
    } catch (const MathError&) {
      ++expr_fail;
    }
  }
  return {chain_fail == 0 && expr_fail == 0,
          fmt("chain_decompose %ld/%ld failed, express_as_symbol %ld/%ld failed", chain_fail, chains, expr_fail,
              exprs)};
}

}  // namespace

int main() {
  const Config cfg;
  ScopedConfig scope(cfg);
  Suite6 suite6 = make_suite6();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"hilbert reciprocity", hilbert_reciprocity},
      {"conic iff symbol vanishes", conic_equivalence},
      {"residue suite", residue_suite},
      {"specialization laws", specialization_laws},
      {"albert step", albert_step},
      {"end-to-end witnesses", [&] { return end_to_end(suite6); }},
      {"branch consistency", [&] { return branch_consistency(suite6); }},
      {"chain_decompose and express_as_symbol", chain_and_express},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("uncaught exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("criterion %zu %-40s %s  %s [%.1fs]\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
