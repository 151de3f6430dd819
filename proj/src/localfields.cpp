#include "massey4/localfields.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace massey4 {

namespace {

bool is_two(const Int& p) { return p == 2; }

Int mod_pos(const Int& a, const Int& m) {
  Int r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

Int inv_mod(const Int& a, const Int& m) {
  Int r;
  if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t())) {
    throw MathError(ErrorKind::NotAUnit, "no inverse of " + a.get_str() + " mod " + m.get_str());
  }
  return r;
}

Int power(const Int& p, long k) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(k));
  return r;
}

// Canonical p-adic square root of the unit square q modulo p^k.
Int padic_sqrt(const Int& q, const Int& p, long k) {
  const Int pk = power(p, k);
  if (is_two(p)) {
    // r^2 = q mod 2^(k+1) pins r down mod 2^k up to sign.
    Int r = 1;
    for (long j = 3; j <= k; ++j) {
      Int m = power(2, j + 1);
      if (mod_pos(r * r - q, m) != 0) r += power(2, j - 1);
    }
    r = mod_pos(r, pk);
    if (mod_pos(r, 4) != 1) r = mod_pos(-r, pk);
    return r;
  }
  Int r = *sqrt_mod_prime(q, p);
  if (2 * r > p) r = p - r;
  // Newton lifting; fixing r mod p keeps the canonical choice.
  Int mod = p;
  while (mod < pk) {
    mod = std::min(Int(mod * mod), pk);
    Int f = mod_pos(r * r - q, mod);
    r = mod_pos(r - f * inv_mod(2 * r, mod), mod);
  }
  return r;
}

Int rat_mod(const Rat& q, const Int& m) {
  return mod_pos(Int(q.get_num()) * inv_mod(Int(q.get_den()), m), m);
}

int hilbert_from_parts(long alpha, const Int& u, long beta, const Int& v, const Int& p) {
  if (is_two(p)) {
    auto eps = [](const Int& x) { return mod_pos(x, 4) == 3 ? 1 : 0; };
    auto omega = [](const Int& x) {
      Int r = mod_pos(x, 8);
      return (r == 3 || r == 5) ? 1 : 0;
    };
    int e = eps(u) * eps(v) + static_cast<int>(alpha & 1) * omega(v) +
            static_cast<int>(beta & 1) * omega(u);
    return (e & 1) ? -1 : 1;
  }
  int s = 1;
  if ((alpha & 1) && (beta & 1) && mod_pos(p, 4) == 3) s = -s;
  if (beta & 1) s *= kronecker_symbol(u, p);
  if (alpha & 1) s *= kronecker_symbol(v, p);
  return s;
}

// ---------------------------------------------------------------------------
// Local model of an etale algebra at p.
//
// The completion of E at a place is modelled by the number field
// Fl = Q(sqrt q_s : s in S)(sqrt t_j : j in pivots), where every q_s is a
// p-adic square; Fl.prefix(|S|) therefore embeds into Q_p (or R) via the
// canonical roots of the q_s.

struct Dependent {
  int index;
  unsigned mask;  // over pivot positions
  Rat scale;      // t_i / prod t_mask = scale^2 * q
  Int q;
  unsigned basis_mask;  // expansion of q in S
  Rat basis_coefficient;  // sqrt(q) = coefficient * prod sqrt(q_s), canonical roots
};

struct LocalModel {
  Int p;
  std::vector<int> pivots;
  std::vector<Dependent> dependents;
  std::vector<Int> basis;  // q_s
  EtaleAlgebra field;      // Fl
  std::vector<LocalSquareClass> descriptor;
};

std::vector<int> xor_bits(std::vector<int> a, const std::vector<int>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
  return a;
}

// Sign of the canonical root of q relative to coefficient * prod canonical roots of basis.
int root_sign(const Int& p, const Int& q, const std::vector<Int>& basis, unsigned mask,
              const Rat& coefficient) {
  if (p == 0) return coefficient > 0 ? 1 : -1;
  const long k = is_two(p) ? 3 : 1;
  const Int m = power(p, k);
  Int prod = rat_mod(coefficient, m);
  for (std::size_t s = 0; s < basis.size(); ++s) {
    if (mask >> s & 1u) prod = mod_pos(prod * padic_sqrt(basis[s], p, k), m);
  }
  Int r = padic_sqrt(q, p, k);
  if (is_two(p)) return mod_pos(prod - r, 4) == 0 ? 1 : -1;
  return prod == r ? 1 : -1;
}

LocalModel build_model(const EtaleAlgebra& E, const Int& p) {
  LocalModel m;
  m.p = p;
  const int n = E.num_generators();
  std::vector<std::vector<int>> pivot_bits;
  for (int i = 0; i < n; ++i) {
    m.descriptor.push_back(local_square_class(Rat(E.generator(i).rep()), p));
  }
  for (int i = 0; i < n; ++i) {
    const auto bits = m.descriptor[i].bits();
    bool found = false;
    for (unsigned mask = 0; mask < (1u << m.pivots.size()) && !found; ++mask) {
      std::vector<int> acc(bits.size(), 0);
      Int prod = 1;
      for (std::size_t k = 0; k < m.pivots.size(); ++k) {
        if (mask >> k & 1u) {
          acc = xor_bits(acc, pivot_bits[k]);
          prod *= E.generator(m.pivots[k]).rep();
        }
      }
      if (acc != bits) continue;
      found = true;
      Rat ratio(E.generator(i).rep(), prod);
      ratio.canonicalize();
      SquareClass q = squarefree_class(ratio);
      Dependent d{i, mask, square_cofactor(ratio), q.rep(), 0, Rat(1)};
      // Express q in the basis S, extending it when independent.
      bool in_span = false;
      for (unsigned bm = 0; bm < (1u << m.basis.size()) && !in_span; ++bm) {
        SquareClass cls;
        Int bprod = 1;
        for (std::size_t s = 0; s < m.basis.size(); ++s) {
          if (bm >> s & 1u) {
            cls = cls * SquareClass::from_squarefree(m.basis[s]);
            bprod *= m.basis[s];
          }
        }
        if (cls == q) {
          Rat c2(q.rep(), bprod);
          c2.canonicalize();
          d.basis_mask = bm;
          d.basis_coefficient = *rational_sqrt(c2);
          in_span = true;
        }
      }
      if (!in_span) {
        d.basis_mask = 1u << m.basis.size();
        m.basis.push_back(q.rep());
      }
      d.basis_coefficient *= root_sign(p, q.rep(), m.basis, d.basis_mask, d.basis_coefficient);
      m.dependents.push_back(d);
    }
    if (!found) {
      m.pivots.push_back(i);
      pivot_bits.push_back(bits);
    }
  }
  std::vector<SquareClass> gens;
  for (const Int& q : m.basis) gens.push_back(SquareClass::from_squarefree(q));
  for (int i : m.pivots) gens.push_back(E.generator(i));
  m.field = EtaleAlgebra(gens);
  return m;
}

AlgebraMap embedding(const EtaleAlgebra& E, const LocalModel& m, const std::vector<int>& signs) {
  const unsigned shift = static_cast<unsigned>(m.basis.size());
  std::vector<AlgebraMap::Image> images(E.num_generators());
  for (std::size_t k = 0; k < m.pivots.size(); ++k) images[m.pivots[k]] = {Rat(1), 1u << (shift + k)};
  for (std::size_t k = 0; k < m.dependents.size(); ++k) {
    const auto& d = m.dependents[k];
    images[d.index] = {Rat(signs[k]) * d.scale * d.basis_coefficient,
                       d.basis_mask | (d.mask << shift)};
  }
  return AlgebraMap(E, m.field, std::move(images));
}

std::size_t global_component(const EtaleAlgebra& E, const AlgebraMap& phi) {
  if (E.num_components() == 1) return 0;
  const auto& comp = E.component(0);
  std::size_t c = 0;
  for (std::size_t k = 0; k < comp.dependents.size(); ++k) {
    unsigned big = 0;
    for (std::size_t q = 0; q < comp.pivots.size(); ++q) {
      if (comp.dependent_masks[k] >> q & 1u) big |= 1u << comp.pivots[q];
    }
    EtaleElement lhs = phi(E.root(comp.dependents[k]));
    EtaleElement rhs = phi(E.monomial(big, comp.dependent_scales[k]));
    if (lhs != rhs) c |= std::size_t{1} << k;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Evaluation of elements of Q(sqrt q_S) at the bottom of the tower.

struct PadicValue {
  long valuation;
  Int unit;
};

std::optional<PadicValue> padic_value(const EtaleElement& x, const std::vector<Int>& basis,
                                      const Int& p, long k) {
  long vmin = 0;
  bool first = true;
  for (const Rat& c : x.coords()) {
    if (c == 0) continue;
    long v = valuation(c, p);
    if (first || v < vmin) vmin = v;
    first = false;
  }
  const Int pk = power(p, k);
  std::vector<Int> roots;
  for (const Int& q : basis) roots.push_back(padic_sqrt(q, p, k));
  Int r = 0;
  const Rat scale = vmin >= 0 ? Rat(1, power(p, vmin)) : Rat(power(p, -vmin));
  for (std::size_t mask = 0; mask < x.coords().size(); ++mask) {
    const Rat& c = x.coords()[mask];
    if (c == 0) continue;
    Int term = rat_mod(Rat(c * scale), pk);
    for (std::size_t s = 0; s < basis.size(); ++s) {
      if (mask >> s & 1u) term = mod_pos(term * roots[s], pk);
    }
    r += term;
  }
  r = mod_pos(r, pk);
  if (r == 0) return std::nullopt;
  const long v = valuation(r, p);
  if (k - v < (is_two(p) ? 3 : 1)) return std::nullopt;
  return PadicValue{vmin + v, r / power(p, v)};
}

int real_sign(const EtaleElement& x) {
  const int n = x.algebra().num_generators();
  if (n == 0) return sgn(x.coord(0));
  const unsigned half = 1u << (n - 1);
  EtaleAlgebra lower = x.algebra().prefix(n - 1);
  EtaleElement a(lower, std::vector<Rat>(x.coords().begin(), x.coords().begin() + half));
  EtaleElement b(lower, std::vector<Rat>(x.coords().begin() + half, x.coords().end()));
  const int sa = a.is_zero() ? 0 : real_sign(a);
  const int sb = b.is_zero() ? 0 : real_sign(b);
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sa == 0 ? sb : sa;
  const Rat q(x.algebra().generator(n - 1).rep());
  return sa * real_sign(a * a - b * b * q);
}

class TowerSymbol {
 public:
  TowerSymbol(const LocalModel& m) : m_(m) {
    for (int l = 0; l <= m.field.num_generators(); ++l) levels_.push_back(m.field.prefix(l));
  }

  // (pi, rho) over the level-l field, as a bit.
  int bit(const EtaleElement& pi, const EtaleElement& rho, int l) const {
    const int bottom = static_cast<int>(m_.basis.size());
    if (l == bottom) return bottom_bit(pi, rho);
    const int top = l - 1;
    const bool pi_low = pi.top_generator() < top;
    const bool rho_low = rho.top_generator() < top;
    if (pi_low && rho_low) return 0;
    if (pi_low) return bit(lower(pi, top), norm_down(rho, top), top);
    if (rho_low) return bit(norm_down(pi, top), lower(rho, top), top);
    EtaleElement prod = -(pi * rho);
    std::vector<EtaleElement> e;
    for (const EtaleElement* lam : {&pi, &rho, static_cast<const EtaleElement*>(&prod)}) {
      auto tr = transfer(*lam, top);
      e.insert(e.end(), tr.begin(), tr.end());
    }
    int acc = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (std::size_t j = i + 1; j < e.size(); ++j) acc ^= bit(e[i], e[j], top);
    }
    EtaleElement minus_one = levels_[top].scalar(-1);
    return acc ^ bit(minus_one, minus_one, top);
  }

 private:
  EtaleElement lower(const EtaleElement& x, int top) const {
    const std::size_t half = std::size_t{1} << top;
    return EtaleElement(levels_[top], std::vector<Rat>(x.coords().begin(), x.coords().begin() + half));
  }
  EtaleElement upper(const EtaleElement& x, int top) const {
    const std::size_t half = std::size_t{1} << top;
    return EtaleElement(levels_[top], std::vector<Rat>(x.coords().begin() + half, x.coords().end()));
  }
  EtaleElement norm_down(const EtaleElement& x, int top) const { return lower(x * x.conj(top), top); }

  // Diagonalized transfer of <lambda> along s(X + Y sqrt t) = Y.
  std::vector<EtaleElement> transfer(const EtaleElement& lam, int top) const {
    EtaleElement y = upper(lam, top);
    if (y.is_zero()) return {levels_[top].one(), levels_[top].scalar(-1)};
    return {y, -(y * norm_down(lam, top))};
  }

  int bottom_bit(const EtaleElement& a, const EtaleElement& b) const {
    if (m_.p == 0) return (real_sign(a) < 0 && real_sign(b) < 0) ? 1 : 0;
    auto va = evaluate(a);
    auto vb = evaluate(b);
    return hilbert_from_parts(va.valuation, va.unit, vb.valuation, vb.unit, m_.p) < 0 ? 1 : 0;
  }

  PadicValue evaluate(const EtaleElement& x) const {
    if (x.is_zero()) throw MathError(ErrorKind::NotAUnit, "zero entry in a local symbol");
    if (m_.basis.empty()) {
      const Rat& c = x.coord(0);
      const long v = valuation(c, m_.p);
      Rat u = c / (v >= 0 ? Rat(power(m_.p, v)) : Rat(1, power(m_.p, -v)));
      return {v, Int(u.get_num()) * Int(u.get_den())};
    }
    const long start = is_two(m_.p) ? 9 : 3;
    for (long k = start;; k *= 2) {
      if (k > config().precision_cap) {
        throw MathError(ErrorKind::PrecisionExhausted,
                        "p-adic evaluation at p=" + m_.p.get_str() + " inconclusive at cap " +
                            std::to_string(config().precision_cap));
      }
      if (auto r = padic_value(x, m_.basis, m_.p, k)) return *r;
    }
  }

  const LocalModel& m_;
  std::vector<EtaleAlgebra> levels_;
};

}  // namespace

// ---------------------------------------------------------------------------

bool LocalSquareClass::is_trivial() const {
  for (int b : bits()) {
    if (b) return false;
  }
  return true;
}

std::vector<int> LocalSquareClass::bits() const {
  if (prime == 0) return {unit};
  if (is_two(prime)) {
    return {valuation_parity, (unit % 4 == 3) ? 1 : 0, (unit == 3 || unit == 5) ? 1 : 0};
  }
  return {valuation_parity, unit};
}

Int LocalSquareClass::representative() const {
  if (prime == 0) return unit ? -1 : 1;
  Int u = 1;
  if (is_two(prime)) {
    static const int reps[8] = {0, 1, 0, -5, 0, 5, 0, -1};
    u = reps[unit];
  } else if (unit) {
    u = 2;
    while (kronecker_symbol(u, prime) != -1) ++u;
  }
  return valuation_parity ? Int(u * prime) : u;
}

LocalSquareClass local_square_class(const Rat& q, const Int& p) {
  if (q == 0) throw MathError(ErrorKind::InvalidInput, "local square class of 0");
  LocalSquareClass out;
  out.prime = p;
  if (p == 0) {
    out.unit = q < 0 ? 1 : 0;
    return out;
  }
  const long v = valuation(q, p);
  out.valuation_parity = static_cast<int>(v & 1);
  Rat u = q / (v >= 0 ? Rat(power(p, v)) : Rat(1, power(p, -v)));
  Int w = Int(u.get_num()) * Int(u.get_den());
  if (is_two(p)) {
    out.unit = static_cast<int>(mod_pos(w, 8).get_si());
  } else {
    out.unit = kronecker_symbol(w, p) == 1 ? 0 : 1;
  }
  return out;
}

std::string LocalPlace::str() const {
  std::ostringstream os;
  os << (is_infinite() ? std::string("inf") : prime.get_str());
  if (!signs.empty()) {
    os << "[";
    for (std::size_t k = 0; k < signs.size(); ++k) os << (signs[k] > 0 ? '+' : '-');
    os << "]";
  }
  return os.str();
}

LocalPlace LocalPlace::truncate(int k) const {
  LocalPlace out;
  out.prime = prime;
  for (int i : pivots) {
    if (i < k) out.pivots.push_back(i);
  }
  for (std::size_t j = 0; j < dependents.size(); ++j) {
    if (dependents[j] < k) {
      out.dependents.push_back(dependents[j]);
      out.signs.push_back(signs[j]);
    }
  }
  out.descriptor.assign(descriptor.begin(), descriptor.begin() + k);
  out.component = 0;  // callers needing it look the place up in the prefix algebra
  return out;
}

bool operator<(const LocalPlace& a, const LocalPlace& b) {
  return std::tie(a.prime, a.dependents, a.signs) < std::tie(b.prime, b.dependents, b.signs);
}

bool operator==(const LocalPlace& a, const LocalPlace& b) {
  return a.prime == b.prime && a.dependents == b.dependents && a.signs == b.signs;
}

std::vector<LocalPlace> places_above(const EtaleAlgebra& E, const Int& p) {
  const LocalModel m = build_model(E, p);
  std::vector<LocalPlace> out;
  const std::size_t count = std::size_t{1} << m.dependents.size();
  for (std::size_t s = 0; s < count; ++s) {
    LocalPlace place;
    place.prime = p;
    place.pivots = m.pivots;
    for (std::size_t k = 0; k < m.dependents.size(); ++k) {
      place.dependents.push_back(m.dependents[k].index);
      place.signs.push_back((s >> k & 1u) ? -1 : 1);
    }
    place.descriptor = m.descriptor;
    place.component = global_component(E, embedding(E, m, place.signs));
    out.push_back(std::move(place));
  }
  return out;
}

int hilbert_symbol_qp(const Rat& a, const Rat& b, const Int& p) {
  if (a == 0 || b == 0) throw MathError(ErrorKind::InvalidInput, "Hilbert symbol of 0");
  if (p == 0) return (a < 0 && b < 0) ? -1 : 1;
  auto parts = [&](const Rat& q) {
    const long v = valuation(q, p);
    Rat u = q / (v >= 0 ? Rat(power(p, v)) : Rat(1, power(p, -v)));
    return std::make_pair(v, Int(Int(u.get_num()) * Int(u.get_den())));
  };
  auto [alpha, u] = parts(a);
  auto [beta, v] = parts(b);
  return hilbert_from_parts(alpha, u, beta, v, p);
}

int hilbert_symbol_qp_by_norms(const Rat& a, const Rat& b, const Int& p) {
  if (a == 0 || b == 0) throw MathError(ErrorKind::InvalidInput, "Hilbert symbol of 0");
  const LocalSquareClass ca = local_square_class(a, p);
  if (ca.is_trivial()) return 1;
  if (p == 0) return b > 0 ? 1 : -1;
  // The norms from Q_p(sqrt a) form an index-2 subgroup of the square classes;
  // collect classes of x^2 - a y^2 until their span has that size.
  const std::size_t full = is_two(p) ? 3 : 2;
  const Rat aa = a * Rat(a.get_den()) * Rat(a.get_den());
  std::vector<unsigned> span;  // reduced basis as bitmasks
  auto to_mask = [](const std::vector<int>& bits) {
    unsigned m = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) m |= static_cast<unsigned>(bits[i]) << i;
    return m;
  };
  auto reduce = [&](unsigned m) {
    for (unsigned b : span) m = std::min(m, m ^ b);
    return m;
  };
  long bound = is_two(p) ? 16 : p.get_si() + 1;
  if (!p.fits_slong_p()) bound = 64;
  const long cap = std::max<long>(bound * 64, 4096);
  while (span.size() < full - 1) {
    if (bound > cap) {
      throw MathError(ErrorKind::SearchBoundExceeded,
                      "norm search for the Hilbert symbol at p=" + p.get_str() + " did not close");
    }
    for (long x = 0; x < bound && span.size() < full - 1; ++x) {
      for (long y = 0; y <= std::min<long>(bound, 8) && span.size() < full - 1; ++y) {
        Rat nrm = Rat(x * x) - aa * Rat(y * y);
        if (nrm == 0) continue;
        unsigned r = reduce(to_mask(local_square_class(nrm, p).bits()));
        if (r) {
          span.push_back(r);
          std::sort(span.rbegin(), span.rend());
        }
      }
    }
    bound *= 2;
  }
  return reduce(to_mask(local_square_class(b, p).bits())) == 0 ? 1 : -1;
}

int local_symbol(const EtaleAlgebra& E, const LocalPlace& place, const EtaleElement& pi,
                 const EtaleElement& rho) {
  if (pi.algebra() != E || rho.algebra() != E) {
    throw MathError(ErrorKind::AlgebraMismatch, "local symbol entries must lie in E");
  }
  const LocalModel m = build_model(E, place.prime);
  if (m.pivots != place.pivots) throw MathError(ErrorKind::AlgebraMismatch, "place is not above E");
  const AlgebraMap phi = embedding(E, m, place.signs);
  const EtaleElement a = phi(pi), b = phi(rho);
  if (a.is_zero() || b.is_zero()) {
    throw MathError(ErrorKind::NotAUnit, "symbol entry vanishes at place " + place.str());
  }
  if (place.is_complex()) return 1;
  TowerSymbol tower(m);
  return tower.bit(a, b, m.field.num_generators()) ? -1 : 1;
}

std::vector<Int> symbol_support(const EtaleElement& pi, const EtaleElement& rho) {
  std::set<Int> primes{Int(0), Int(2)};
  const EtaleAlgebra& E = pi.algebra();
  for (const auto& g : E.generators()) {
    for (const Int& p : prime_support(Rat(g.rep()))) primes.insert(p);
  }
  for (const EtaleElement* x : {&pi, &rho}) {
    Int den = 1;
    for (const Rat& c : x->coords()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
    for (const Int& p : prime_support(Rat(den))) primes.insert(p);
    // Norm to Q of each component image; zero divisors are rejected later by local_symbol.
    for (std::size_t c = 0; c < E.num_components(); ++c) {
      EtaleElement xc = x->to_component(c) * Rat(den);
      // Factor the integer content apart from the norm of the primitive part.
      Int content = 0;
      for (const Rat& q : xc.coords()) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), q.get_num_mpz_t());
      if (content == 0) throw MathError(ErrorKind::NotAUnit, "symbol entry is a zero divisor");
      for (const Int& p : prime_support(Rat(content))) primes.insert(p);
      xc = xc * Rat(1 / Rat(content));
      Rat n = norm_to_q(xc);
      if (n == 0) throw MathError(ErrorKind::NotAUnit, "symbol entry is a zero divisor");
      for (const Int& p : prime_support(n)) primes.insert(p);
    }
  }
  return {primes.begin(), primes.end()};
}

}  // namespace massey4
