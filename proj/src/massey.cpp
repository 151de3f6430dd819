#include "massey4/massey.hpp"

#include <cstdlib>
#include <numeric>
#include <tuple>

#include "massey4/conics.hpp"
#include "massey4/funcfield.hpp"
#include "massey4/qforms.hpp"

namespace massey4 {

namespace {

void require_member(const EtaleElement& x, const EtaleAlgebra& F, const char* what) {
  if (x.algebra() != F) throw MathError(ErrorKind::AlgebraMismatch, std::string(what) + " lives in the wrong algebra");
}

void require_algebra(const EtaleElement& x, const EtaleAlgebra& F, const char* what) {
  require_member(x, F, what);
  if (!x.is_unit()) throw MathError(ErrorKind::NotAUnit, std::string(what) + " is not a unit");
}

std::string first_obstruction(const BrauerClass2& A) {
  const auto primes = A.primes();
  if (primes.empty()) return "none";
  return primes.front() == 0 ? std::string("inf") : "p=" + primes.front().get_str();
}

// Unit of F_t with norm t' (as classes); 1 when t' is trivial.
EtaleElement norm_preimage(const SquareClass& t, const SquareClass& target) {
  const EtaleAlgebra F = quadratic_algebra(t);
  if (target.is_trivial()) return F.one();
  return solve_rational_norm(t, Rat(target.rep()));
}

// Postconditions (1) and (2) of the (x, nu) construction.
bool x_nu_holds(const EtaleElement& alpha, const EtaleElement& delta, const Rat& x, const EtaleElement& nu) {
  if (x == 0 || !nu.is_unit()) return false;
  const EtaleAlgebra Fad = biquadratic_algebra(alpha.algebra().generator(0), delta.algebra().generator(0));
  const EtaleElement ax = alpha * x;
  const EtaleElement ax_ad = embed_first(ax, Fad);
  if (symbol(ax_ad, embed_second(delta, Fad)) != symbol(ax_ad, embed_first(nu, Fad))) return false;
  return corestriction(symbol(ax, nu), 0).is_zero();
}

// Integer points by increasing max-norm, in a fixed order inside each ring.
std::vector<std::array<Rat, 2>> spiral(std::size_t count) {
  std::vector<std::array<Rat, 2>> out{{Rat(0), Rat(0)}};
  for (long r = 1; out.size() < count; ++r) {
    for (long i = -r; i <= r; ++i) {
      for (long j = -r; j <= r; ++j) {
        if (std::max(std::labs(i), std::labs(j)) == r) out.push_back({Rat(i), Rat(j)});
      }
    }
  }
  out.resize(count);
  return out;
}

// v / s^2 for the rational s removing the square parts of the content's numerator and denominator.
std::pair<EtaleElement, Rat> reduce_by_rational_squares(const EtaleElement& v) {
  Int den = 1, num = 0;
  for (const Rat& q : v.coords()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
  for (const Rat& q : v.coords()) {
    const Rat scaled = q * den;
    mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), scaled.get_num_mpz_t());
  }
  Rat s = 1;
  try {
    s = square_cofactor(Rat(num)) / square_cofactor(Rat(den));
  } catch (const MathError&) {
    // leave v as it is when the content is too large to factor
  }
  return {v * (1 / (s * s)), s};
}

}  // namespace

EtaleElement embed_first(const EtaleElement& x, const EtaleAlgebra& Fad) { return extend_from_prefix(x, Fad); }

EtaleElement embed_second(const EtaleElement& x, const EtaleAlgebra& Fad) {
  return AlgebraMap(x.algebra(), Fad, {{Rat(1), 2u}})(x);
}

MasseyInputs normalize_inputs(const Rat& a, const Rat& b, const Rat& c, const Rat& d) {
  for (const Rat* q : {&a, &b, &c, &d}) {
    if (*q == 0) throw MathError(ErrorKind::InvalidInput, "Massey inputs must be nonzero");
  }
  return {squarefree_class(a), squarefree_class(b), squarefree_class(c), squarefree_class(d)};
}

CertificateReport check_vanish_certificate(const MasseyInputs& in, const EtaleElement& alpha,
                                           const EtaleElement& delta) {
  require_algebra(alpha, quadratic_algebra(in.a), "alpha");
  require_algebra(delta, quadratic_algebra(in.d), "delta");
  CertificateReport r;
  if (squarefree_class(norm_to_q(alpha)) != in.b) r.failed.push_back("norm-b");
  if (squarefree_class(norm_to_q(delta)) != in.c) r.failed.push_back("norm-c");
  const EtaleAlgebra Fad = biquadratic_algebra(in.a, in.d);
  r.symbol = symbol(embed_first(alpha, Fad), embed_second(delta, Fad));
  if (!r.symbol.is_zero()) r.failed.push_back("symbol");
  r.ok = r.failed.empty();
  return r;
}

CertificateReport check_defined_certificate(const MasseyInputs& in, const EtaleElement& alpha,
                                            const EtaleElement& delta) {
  require_algebra(alpha, quadratic_algebra(in.a), "alpha");
  require_algebra(delta, quadratic_algebra(in.d), "delta");
  CertificateReport r;
  if (squarefree_class(norm_to_q(alpha)) != in.b) r.failed.push_back("norm-b");
  if (squarefree_class(norm_to_q(delta)) != in.c) r.failed.push_back("norm-c");
  const EtaleAlgebra Fad = biquadratic_algebra(in.a, in.d);
  r.symbol = symbol(embed_first(alpha, Fad), embed_second(delta, Fad));
  if (!in_image_of_ground(r.symbol)) r.failed.push_back("image");
  r.ok = r.failed.empty();
  return r;
}

SearchOutcome search_defined_certificate(const MasseyInputs& in, std::uint64_t budget) {
  SearchOutcome out;
  const BrauerClass2 ab = symbol(Rat(in.a.rep()), Rat(in.b.rep()));
  if (!ab.is_zero()) {
    out.obstruction = "(a,b) at " + first_obstruction(ab);
    return out;
  }
  const BrauerClass2 dc = symbol(Rat(in.d.rep()), Rat(in.c.rep()));
  if (!dc.is_zero()) {
    out.obstruction = "(d,c) at " + first_obstruction(dc);
    return out;
  }
  // A defined product has vanishing sub-products <a,b,c> and <b,c,d>, hence (b,c) = 0.
  const BrauerClass2 bc = symbol(Rat(in.b.rep()), Rat(in.c.rep()));
  if (!bc.is_zero()) {
    out.obstruction = "(b,c) at " + first_obstruction(bc);
    return out;
  }
  // Every alpha with N(alpha) = b mod squares is alpha0 * r up to squares, r rational; same for delta.
  const EtaleElement alpha0 = norm_preimage(in.a, in.b);
  const EtaleElement delta0 = norm_preimage(in.d, in.c);
  std::vector<Int> scalars{1, -1};
  for (long n = 2; scalars.size() < 64; ++n) {
    if (squarefree_class(Rat(n)).rep() != n) continue;
    scalars.push_back(n);
    scalars.push_back(-n);
  }
  for (std::size_t level = 0; level < scalars.size(); ++level) {
    for (std::size_t i = 0; i <= level; ++i) {
      for (std::size_t j = 0; j <= level; ++j) {
        if (std::max(i, j) != level) continue;
        if (out.tried >= budget) return out;
        ++out.tried;
        const EtaleElement alpha = alpha0 * Rat(scalars[i]);
        const EtaleElement delta = delta0 * Rat(scalars[j]);
        if (check_defined_certificate(in, alpha, delta).ok) {
          out.certificate = DefinedCertificate{in, alpha, delta};
          return out;
        }
      }
    }
  }
  return out;
}

namespace {

// The k-th eps = s + t sqrt(a) with (d, N(eps)) = 0, ordered by max(|s|, |t|); eps_0 = 1.
EtaleElement eta_twist(const EtaleAlgebra& Fa, const SquareClass& d, std::size_t k) {
  if (k == 0) return Fa.one();
  std::size_t seen = 0;
  for (long r = 1;; ++r) {
    for (long s = -r; s <= r; ++s) {
      for (long t = 1; t <= r; ++t) {
        if (std::max(std::labs(s), t) != r || std::gcd(s, t) != 1) continue;
        const EtaleElement e = Fa.from_coords({Rat(s), Rat(t)});
        if (!e.is_unit() || !symbol(Rat(d.rep()), norm_to_q(e)).is_zero()) continue;
        if (++seen == k) return e;
      }
    }
  }
}

}  // namespace

std::pair<EtaleElement, EtaleElement> split_alpha(const SquareClass& a, const Rat& c, const EtaleElement& alpha) {
  const EtaleAlgebra Fa = quadratic_algebra(a);
  require_algebra(alpha, Fa, "alpha");
  if (c == 0 || rational_sqrt(c)) throw MathError(ErrorKind::PreconditionFailed, "c is a square");
  // Solve over F_{a, sf(c)} and rescale the sqrt(c) part by the square cofactor of c.
  const Rat k = square_cofactor(c);
  const EtaleElement xi = solve_norm_equation(Fa.adjoin(squarefree_class(c)), alpha);
  EtaleElement a1 = Fa.from_coords({xi.coord(0), xi.coord(1)});
  EtaleElement a2 = Fa.from_coords({xi.coord(2) / k, xi.coord(3) / k});
  if (a1 * a1 - a2 * a2 * c != alpha) throw MathError(ErrorKind::VerificationFailed, "alpha1^2 - c alpha2^2 != alpha");
  return {a1, a2};
}

PipelineFunctions pipeline_functions(const EtaleElement& alpha1, const EtaleElement& alpha2, const Rat& c,
                                     const Rat& u1) {
  const EtaleAlgebra& Fa = alpha1.algebra();
  const BivariatePoly X1 = BivariatePoly::x1(Fa), X2 = BivariatePoly::x2(Fa);
  PipelineFunctions p;
  p.f = X1 * X1 - X2 * X2 * Fa.scalar(c);
  p.h1 = X1 * alpha1 + X2 * (alpha2 * c);
  p.h2 = X2 * alpha1 + X1 * alpha2;
  p.h = p.h1 + p.h2 * Fa.scalar(u1);
  p.g = BivariateRat(p.h * Fa.scalar(2), p.h2);
  return p;
}

std::vector<ResidueCheck> pipeline_residue_checks(const SquareClass& a, const Rat& c, const SquareClass& d,
                                                  const EtaleElement& alpha1, const EtaleElement& alpha2,
                                                  const Rat& u1) {
  const EtaleAlgebra Fa = quadratic_algebra(a);
  require_member(alpha1, Fa, "alpha1");
  require_member(alpha2, Fa, "alpha2");
  const EtaleElement alpha = alpha1 * alpha1 - alpha2 * alpha2 * c;
  if (!alpha.is_unit()) throw MathError(ErrorKind::NotAUnit, "alpha1^2 - c alpha2^2 is not a unit");
  const PipelineFunctions pf = pipeline_functions(alpha1, alpha2, c, u1);
  const std::vector<SymbolTerm> B{{BivariateRat(pf.f * alpha), pf.g},
                                  {BivariateRat(BivariatePoly::constant(Fa, Rat(d.rep()))), BivariateRat(pf.h)}};
  std::vector<ResidueCheck> out;
  auto line_of = [](const BivariatePoly& p) {
    return DivisorSpec::line(p.coefficient(0, 0), p.coefficient(1, 0), p.coefficient(0, 1));
  };
  for (std::size_t k = 0; k < Fa.num_components(); ++k) {
    const EtaleAlgebra K = Fa.component_field(k);
    std::vector<SymbolTerm> Bk;
    for (const auto& [x, y] : B) Bk.emplace_back(x.to_component(k), y.to_component(k));
    const std::string tag = Fa.is_field() ? "" : "[" + std::to_string(k) + "]";
    const BivariatePoly X1 = BivariatePoly::x1(K), X2 = BivariatePoly::x2(K);
    const BivariateRat expect = BivariateRat(BivariatePoly::constant(K, 2 * u1)) + BivariateRat(X1 * K.scalar(2), X2);
    for (const DivisorSpec& D1 : DivisorSpec::conic_components(K, c)) {
      const ResidueClass r = residue_of_sum(Bk, D1), e = restrict_to(expect, D1);
      out.push_back({"D1" + tag, D1.str(), r.str(), e.str(), r == e});
    }
    for (const auto& [label, poly] : {std::pair{"D2", pf.h2}, std::pair{"D3", pf.h}}) {
      const DivisorSpec D = line_of(poly.to_component(k));
      const ResidueClass r = residue_of_sum(Bk, D);
      out.push_back({label + tag, D.str(), r.str(), "trivial", r.is_trivial()});
    }
  }
  const EtaleAlgebra Q;
  std::vector<DivisorSpec> Ds{DivisorSpec::binary_quadratic(Q.one(), Q.zero(), Q.scalar(-c)),
                              DivisorSpec::line(Q.zero(), Q.one(), Q.zero()),
                              DivisorSpec::line(Q.scalar(-1), Q.one(), Q.scalar(2))};
  if (Fa.is_field()) {
    for (const BivariatePoly* p : {&pf.h2, &pf.h}) {
      const EtaleElement l1 = p->coefficient(1, 0), l2 = p->coefficient(0, 1);
      Ds.push_back(DivisorSpec::binary_quadratic(norm(l1), trace(l1 * l2.conj(0)), norm(l2)));
    }
  }
  for (const DivisorSpec& D : Ds) {
    const ResidueClass r = corestricted_residue(B, D);
    out.push_back({"N(B)", D.str(), r.str(), "trivial", r.is_trivial()});
  }
  return out;
}

XNuResult construct_x_nu(const SquareClass& a, const Rat& c, const SquareClass& d, const EtaleElement& alpha,
                         const EtaleElement& delta, std::size_t variant) {
  const EtaleAlgebra Fa = quadratic_algebra(a), Fd = quadratic_algebra(d);
  const EtaleAlgebra Fad = biquadratic_algebra(a, d);
  require_algebra(alpha, Fa, "alpha");
  require_algebra(delta, Fd, "delta");
  if (c == 0 || rational_sqrt(c)) throw MathError(ErrorKind::PreconditionFailed, "c is a square");
  if (norm_to_q(delta) != c) throw MathError(ErrorKind::PreconditionFailed, "N(delta) != c exactly");
  if (!in_image_of_ground(symbol(embed_first(alpha, Fad), embed_second(delta, Fad)))) {
    throw MathError(ErrorKind::PreconditionFailed, "(alpha, delta) does not come from Br(Q)");
  }
  XNuResult out;
  XNuTrace& tr = out.trace;
  tr.u1 = delta.coord(0);
  tr.u2 = delta.coord(1);
  const Rat& u1 = tr.u1;

  // alpha = alpha1^2 - c alpha2^2 from a relative norm over F_{a,c}.
  std::tie(tr.alpha1, tr.alpha2) = split_alpha(a, c, alpha);
  const EtaleElement& a1 = tr.alpha1;
  const EtaleElement& a2 = tr.alpha2;

  if (a1.coord(0) * a2.coord(1) == a1.coord(1) * a2.coord(0)) {
    tr.dependent = true;
    out.nu = Fa.one();
    if (a2.is_zero()) {
      out.x = 1;
    } else {
      const int m = a2.coord(0) != 0 ? 0 : 1;
      const Rat t = a1.coord(m) / a2.coord(m);
      out.x = t * t - c;
    }
    if (!x_nu_holds(alpha, delta, out.x, out.nu)) throw MathError(ErrorKind::VerificationFailed, "dependent case");
    return out;
  }
  if (u1 * u1 == c) throw MathError(ErrorKind::VerificationFailed, "c = u1^2");

  const EtaleAlgebra Q;
  const BivariatePoly fQ = BivariatePoly::x1(Q).pow(2) - BivariatePoly::x2(Q).pow(2) * Q.scalar(c);
  const auto [f, h1, h2, h, g] = pipeline_functions(a1, a2, c, u1);
  if (f * alpha != h1 * h1 - h2 * h2 * Fa.scalar(c)) {
    throw MathError(ErrorKind::VerificationFailed, "alpha f != h1^2 - c h2^2");
  }

  // The constant class N(alpha f, g) - (d, N(h)), read off at a regular point P0.
  bool found = false;
  BrauerClass2 A;
  for (const auto& p0 : spiral(static_cast<std::size_t>(std::max<std::uint64_t>(config().budget, 1)))) {
    const Rat fv = fQ.evaluate(p0[0], p0[1]).coord(0);
    const EtaleElement h2v = h2.evaluate(p0[0], p0[1]), hv = h.evaluate(p0[0], p0[1]);
    if (fv == 0 || !h2v.is_unit() || !hv.is_unit()) continue;
    const EtaleElement gv = hv * Rat(2) * h2v.inverse();
    A = corestriction(symbol(alpha * fv, gv), 0) + symbol(Rat(d.rep()), norm_to_q(hv));
    tr.p0 = p0;
    found = true;
    break;
  }
  if (!found) throw MathError(ErrorKind::SearchBoundExceeded, "no regular auxiliary point");
  if (A.is_zero()) {
    tr.eta = Fa.one();
  } else {
    // A = (d, w) = (ad, w'); the chain lemma splits w = n_d n_a with n_a a norm from F_a.
    const SquareClass ad = a * d;
    const Int w = express_as_symbol(A, d);
    const Int w2 = express_as_symbol(A, ad);
    const ChainDecomposition ch = chain_decompose(d, squarefree_class(Rat(w)), ad, squarefree_class(Rat(w2)));
    tr.eta = ch.xi_ab.algebra() == Fa ? ch.xi_ab : solve_rational_norm(a, Rat(ch.n_ab));
  }
  tr.eta = tr.eta * eta_twist(Fa, d, variant);
  if (symbol(Rat(d.rep()), norm_to_q(tr.eta)) != A) throw MathError(ErrorKind::VerificationFailed, "(d, N(eta)) != A");

  // (alpha1 + u1 alpha2) P1 + (u1 alpha1 + c alpha2) P2 = eta over Q.
  const EtaleElement v1 = a1 + a2 * u1, v2 = a1 * u1 + a2 * c;
  const Rat det = v1.coord(0) * v2.coord(1) - v1.coord(1) * v2.coord(0);
  if (det == 0) throw MathError(ErrorKind::VerificationFailed, "singular system for P");
  tr.point[0] = (tr.eta.coord(0) * v2.coord(1) - tr.eta.coord(1) * v2.coord(0)) / det;
  tr.point[1] = (v1.coord(0) * tr.eta.coord(1) - v1.coord(1) * tr.eta.coord(0)) / det;
  if (h.evaluate(tr.point[0], tr.point[1]) != tr.eta) throw MathError(ErrorKind::VerificationFailed, "h(P) != eta");

  for (bool swapped : {false, true}) {
    const ParamSystem ps{tr.point[0], tr.point[1], swapped};
    tr.x_value = specialize_class1(BivariateRat(fQ), ps).coord(0);
    tr.nu_value = specialize_class1(g, ps);
    tr.swapped = swapped;
    out.x = Rat(squarefree_class(tr.x_value).rep());
    out.nu = reduce_by_rational_squares(tr.nu_value).first;
    if (x_nu_holds(alpha, delta, out.x, out.nu)) return out;
  }
  throw MathError(ErrorKind::VerificationFailed, "(x, nu) fails the postconditions in both parameter orders");
}

bool verify_norm_certificate(const Witness& w) {
  if (!w.certificate) return false;
  const EtaleAlgebra Fad = biquadratic_algebra(w.in.a, w.in.d);
  const auto& [p, q] = *w.certificate;
  if (p.algebra() != Fad || q.algebra() != Fad) return false;
  return p * p - embed_first(w.alpha, Fad) * q * q == embed_second(w.delta, Fad);
}

namespace {

constexpr std::size_t kEtaVariants = 8;

// p + q sqrt(s^2) with norm t, for a unit s.
NormCertificate square_certificate(const EtaleElement& s, const EtaleElement& t) {
  const EtaleAlgebra& F = t.algebra();
  return {(t + F.one()) * Rat(1, 2), (t - F.one()) * (s * Rat(2)).inverse()};
}

std::optional<NormCertificate> general_certificate(const Witness& w, const EtaleElement& delta,
                                                   const XNuResult& xr, const AlbertResult& ar) {
  const EtaleAlgebra Fad = biquadratic_algebra(w.in.a, w.in.d);
  const EtaleElement ap = embed_first(w.alpha, Fad), dp = embed_second(w.delta, Fad);
  if (xr.trace.dependent) {
    const SquareRootResult sq = is_square_with_witness(ap);
    if (sq.is_square && sq.root->is_unit()) return square_certificate(*sq.root, dp);
    return std::nullopt;
  }
  if (!ar.zw) return std::nullopt;
  // At a regular P: delta nu = N(delta + rho(P)) with rho = (h1 + sqrt(alpha f)) / h2, and
  // nu y = N(nu z + nu w sqrt(alpha x)) from the Albert step.
  const XNuTrace& tr = xr.trace;
  const Rat& P1 = tr.point[0];
  const Rat& P2 = tr.point[1];
  const Rat c = w.c_exact;
  const Rat X = P1 * P1 - c * P2 * P2;
  if (X == 0 || X != tr.x_value) return std::nullopt;
  const auto r = rational_sqrt(X / xr.x);
  const auto [nu_red, s] = reduce_by_rational_squares(tr.nu_value);
  if (!r || nu_red != xr.nu) return std::nullopt;
  const EtaleElement h1 = tr.alpha1 * P1 + tr.alpha2 * (c * P2);
  const EtaleElement h2 = tr.alpha1 * P2 + tr.alpha2 * P1;
  if (!h2.is_unit()) return std::nullopt;
  const EtaleElement h2inv = h2.inverse();
  if (tr.nu_value != (h1 * h2inv + w.alpha.algebra().scalar(tr.u1)) * Rat(2)) return std::nullopt;
  // With X = x r^2 and g(P) = nu s^2: zeta = (delta + rho)(nu z + nu w sqrt(alpha x)) / (nu s).
  const EtaleElement p1 = embed_second(delta, Fad) + embed_first(h1 * h2inv, Fad);
  const EtaleElement q1 = embed_first(h2inv * *r, Fad);
  const EtaleElement p2 = embed_first(xr.nu * ar.zw->first, Fad);
  const EtaleElement q2 = embed_first(xr.nu * ar.zw->second, Fad);
  const EtaleElement nu_inv = embed_first((xr.nu * s).inverse(), Fad);
  return NormCertificate{(p1 * p2 + ap * q1 * q2) * nu_inv, (p1 * q2 + q1 * p2) * nu_inv};
}

}  // namespace

Witness general_branch_witness(const DefinedCertificate& cert) {
  Witness w;
  w.in = cert.in;
  w.branch = "general";
  w.used = cert;
  w.c_exact = norm_to_q(cert.delta);
  // A different eta moves P; retried when a large value defeats factorization.
  std::optional<XNuResult> found;
  AlbertResult ar;
  for (std::size_t variant = 0;; ++variant) {
    try {
      XNuResult xr = construct_x_nu(cert.in.a, w.c_exact, cert.in.d, cert.alpha, cert.delta, variant);
      ar = albert_solve(cert.in.a, cert.alpha * xr.x, xr.nu);
      found = std::move(xr);
      break;
    } catch (const MathError& e) {
      if (e.kind() != ErrorKind::FactorizationBoundExceeded || variant + 1 >= kEtaVariants) throw;
    }
  }
  XNuResult& xr = *found;
  w.alpha = cert.alpha * xr.x;
  w.y = ar.y;
  w.delta = cert.delta * Rat(ar.y);
  w.certificate = general_certificate(w, cert.delta, xr, ar);
  if (w.certificate && !verify_norm_certificate(w)) {
    throw MathError(ErrorKind::VerificationFailed, "explicit norm certificate does not check");
  }
  w.x_nu = std::move(xr);
  return w;
}

Witness vanish_witness(const MasseyInputs& in, const std::optional<DefinedCertificate>& cert,
                       std::uint64_t budget) {
  Witness w;
  if (in.c.is_trivial()) {
    const BrauerClass2 ab = symbol(Rat(in.a.rep()), Rat(in.b.rep()));
    if (!ab.is_zero()) throw MathError(ErrorKind::NoCertificate, "(a,b) != 0, obstruction at " + first_obstruction(ab));
    w.in = in;
    w.branch = "c-square";
    w.c_exact = 1;
    w.alpha = norm_preimage(in.a, in.b);
    w.delta = quadratic_algebra(in.d).one();
    const EtaleAlgebra Fad = biquadratic_algebra(in.a, in.d);
    w.certificate = NormCertificate{Fad.one(), Fad.zero()};
  } else {
    DefinedCertificate dc;
    if (cert) {
      const CertificateReport r = check_defined_certificate(in, cert->alpha, cert->delta);
      if (!r.ok) throw MathError(ErrorKind::PreconditionFailed, "certificate rejected: " + r.failed.front());
      dc = *cert;
      dc.in = in;
    } else {
      SearchOutcome s = search_defined_certificate(in, budget);
      if (!s.certificate) {
        throw MathError(ErrorKind::NoCertificate,
                        s.obstruction ? "not defined: " + *s.obstruction : "no certificate within budget");
      }
      dc = *s.certificate;
    }
    w = general_branch_witness(dc);
  }
  if (!check_vanish_certificate(in, w.alpha, w.delta).ok) {
    throw MathError(ErrorKind::VerificationFailed, "witness fails the vanishing conditions");
  }
  return w;
}

}  // namespace massey4
