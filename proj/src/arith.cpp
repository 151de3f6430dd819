#include "massey4/arith.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace massey4 {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::FactorizationBoundExceeded: return "FactorizationBoundExceeded";
    case ErrorKind::GeneratorLimitExceeded: return "GeneratorLimitExceeded";
    case ErrorKind::NotAUnit: return "NotAUnit";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::AlgebraMismatch: return "AlgebraMismatch";
    case ErrorKind::NoSolutionInSupport: return "NoSolutionInSupport";
    case ErrorKind::NotSplitByFa: return "NotSplitByFa";
    case ErrorKind::SearchBoundExceeded: return "SearchBoundExceeded";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
    case ErrorKind::ZeroDivisorOnRestriction: return "ZeroDivisorOnRestriction";
    case ErrorKind::NoCertificate: return "NoCertificate";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

namespace {

const Config kDefaultConfig{};
thread_local const Config* tl_config = nullptr;

const std::vector<unsigned>& small_primes() {
  static const std::vector<unsigned> primes = [] {
    constexpr unsigned kLimit = 1'000'000;
    std::vector<bool> composite(kLimit + 1, false);
    std::vector<unsigned> out;
    for (unsigned i = 2; i <= kLimit; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (std::uint64_t j = std::uint64_t{i} * i; j <= kLimit; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

// Brent's variant of Pollard rho; returns a nontrivial factor or 0 on budget exhaustion.
// Consumes iterations from `remaining`; 0 when it runs out or the cycle closes without a split.
Int pollard_brent(const Int& n, unsigned long c, std::uint64_t& remaining) {
  Int y = 2, x, ys, q = 1, g = 1, diff;
  std::uint64_t r = 1;
  constexpr std::uint64_t kBatch = 128;
  auto f = [&](Int& v) {
    v = v * v + c;
    mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
  };
  while (g == 1) {
    x = y;
    for (std::uint64_t i = 0; i < r; ++i) f(y);
    std::uint64_t k = 0;
    while (k < r && g == 1) {
      ys = y;
      std::uint64_t lim = std::min(kBatch, r - k);
      for (std::uint64_t i = 0; i < lim; ++i) {
        f(y);
        diff = x - y;
        q *= abs(diff);
        mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      }
      mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      k += lim;
      if (lim > remaining) {
        remaining = 0;
        return 0;
      }
      remaining -= lim;
    }
    r *= 2;
  }
  if (g == n) {
    do {
      f(ys);
      diff = x - ys;
      mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    } while (g == 1);
  }
  return g == n ? Int(0) : g;
}

void split_composite(const Int& n, std::vector<Int>& out) {
  if (n == 1) return;
  if (is_probable_prime(n)) {
    out.push_back(n);
    return;
  }
  if (mpz_perfect_square_p(n.get_mpz_t())) {
    Int r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    split_composite(r, out);
    split_composite(r, out);
    return;
  }
  std::uint64_t remaining = config().rho_iterations;
  const unsigned long c0 = static_cast<unsigned long>(config().seed % 1000);
  for (unsigned long c = c0 + 1; c <= c0 + 8 && remaining > 0; ++c) {
    Int d = pollard_brent(n, c, remaining);
    if (d != 0) {
      split_composite(d, out);
      split_composite(Int(n / d), out);
      return;
    }
  }
  throw MathError(ErrorKind::FactorizationBoundExceeded,
                  "rho budget exhausted on composite cofactor " + n.get_str());
}

thread_local std::map<Int, FactoredInt> t_cache;
// Primes above the trial-division range met so far on this thread; tried before the
// size bound applies. Per thread so that a job's outcome does not depend on its neighbours.
thread_local std::set<Int> t_known_primes;

}  // namespace

const Config& config() { return tl_config ? *tl_config : kDefaultConfig; }

ScopedConfig::ScopedConfig(const Config& cfg) : previous_(tl_config), current_(cfg) {
  tl_config = &current_;
}
ScopedConfig::~ScopedConfig() { tl_config = previous_; }

Int FactoredInt::value() const {
  Int v = sign;
  for (const auto& [p, e] : factors) {
    Int pe;
    mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
    v *= pe;
  }
  return v;
}

bool is_probable_prime(const Int& n) {
  if (n < 2) return false;
  return mpz_probab_prime_p(n.get_mpz_t(), 30) > 0;
}

Int next_prime(const Int& n) {
  Int r;
  mpz_nextprime(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

void clear_factor_hints() {
  t_known_primes.clear();
  t_cache.clear();
}

FactoredInt factor(const Int& n) {
  if (n == 0) throw MathError(ErrorKind::InvalidInput, "factor(0)");
  Int m = abs(n);
  if (auto it = t_cache.find(m); it != t_cache.end()) {
    FactoredInt out = it->second;
    out.sign = n < 0 ? -1 : 1;
    return out;
  }
  FactoredInt out;
  out.sign = n < 0 ? -1 : 1;
  Int rest = m;
  for (unsigned p : small_primes()) {
    if (rest == 1) break;
    if (Int(p) * p > rest) break;
    if (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      unsigned e = 0;
      while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
        mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
        ++e;
      }
      out.factors.emplace_back(Int(p), e);
    }
  }
  std::vector<Int> primes;
  if (rest > 1) {
    for (const Int& p : t_known_primes) {
      while (mpz_divisible_p(rest.get_mpz_t(), p.get_mpz_t())) {
        mpz_divexact(rest.get_mpz_t(), rest.get_mpz_t(), p.get_mpz_t());
        primes.push_back(p);
      }
      if (rest == 1) break;
    }
  }
  if (rest > 1 && mpz_sizeinbase(rest.get_mpz_t(), 10) > static_cast<size_t>(config().factor_digits)) {
    throw MathError(ErrorKind::FactorizationBoundExceeded,
                    "cofactor of |n| has more than " + std::to_string(config().factor_digits) + " digits");
  }
  if (rest > 1 || !primes.empty()) {
    if (rest > 1) split_composite(rest, primes);
    std::sort(primes.begin(), primes.end());
    for (const Int& p : primes) {
      if (!out.factors.empty() && out.factors.back().first == p) {
        ++out.factors.back().second;
      } else {
        out.factors.emplace_back(p, 1);
      }
    }
  }
  if (t_cache.size() > 200000) t_cache.clear();
  t_cache.emplace(m, out);
  if (t_known_primes.size() > 20000) t_known_primes.clear();
  for (const auto& [p, e] : out.factors) {
    if (p > small_primes().back()) t_known_primes.insert(p);
  }
  return out;
}

std::vector<Int> prime_support(const Rat& q) {
  std::vector<Int> out;
  for (const auto& [p, e] : factor(q.get_num()).factors) out.push_back(p);
  for (const auto& [p, e] : factor(q.get_den()).factors) out.push_back(p);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

long valuation(const Int& n, const Int& p) {
  if (n == 0) throw MathError(ErrorKind::InvalidInput, "valuation of 0");
  Int m = n;
  long v = 0;
  while (mpz_divisible_p(m.get_mpz_t(), p.get_mpz_t())) {
    mpz_divexact(m.get_mpz_t(), m.get_mpz_t(), p.get_mpz_t());
    ++v;
  }
  return v;
}

long valuation(const Rat& q, const Int& p) {
  return valuation(Int(q.get_num()), p) - valuation(Int(q.get_den()), p);
}

SquareClass SquareClass::from_squarefree(Int rep) { return SquareClass(std::move(rep)); }

SquareClass SquareClass::operator*(const SquareClass& other) const {
  Int g;
  mpz_gcd(g.get_mpz_t(), rep_.get_mpz_t(), other.rep_.get_mpz_t());
  Int r = (rep_ / g) * (other.rep_ / g);
  if (g < 0) r = -r;
  return SquareClass(r);
}

namespace {
Int squarefree_part(const Int& n) {
  Int out = n < 0 ? -1 : 1;
  for (const auto& [p, e] : factor(n).factors) {
    if (e % 2) out *= p;
  }
  return out;
}
}  // namespace

SquareClass squarefree_class(const Rat& q) {
  if (q == 0) throw MathError(ErrorKind::InvalidInput, "square class of 0");
  // q ~ num * den modulo squares
  Int a = squarefree_part(q.get_num());
  Int b = squarefree_part(q.get_den());
  return SquareClass::from_squarefree(a) * SquareClass::from_squarefree(b);
}

Rat square_cofactor(const Rat& q) {
  Rat ratio = q / Rat(squarefree_class(q).rep());
  auto root = rational_sqrt(ratio);
  return *root;
}

int kronecker_symbol(const Int& a, const Int& n) {
  return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

std::optional<Int> sqrt_mod_prime(const Int& a, const Int& p) {
  auto mod = [&](const Int& x) {
    Int r;
    mpz_mod(r.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t());
    return r;
  };
  auto pow_mod = [&](const Int& b, const Int& e) {
    Int r;
    mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    return r;
  };
  const Int x0 = mod(a);
  if (x0 == 0 || p == 2) return x0;
  if (kronecker_symbol(x0, p) != 1) return std::nullopt;
  Int s = p - 1;
  unsigned long e = 0;
  while (mpz_even_p(s.get_mpz_t())) {
    s /= 2;
    ++e;
  }
  Int z = 2;
  while (kronecker_symbol(z, p) != -1) ++z;
  Int x = pow_mod(x0, (s + 1) / 2), b = pow_mod(x0, s), g = pow_mod(z, s);
  unsigned long r = e;
  while (b != 1) {
    unsigned long m = 0;
    for (Int t = b; t != 1; t = mod(t * t)) ++m;
    Int gs = g;
    for (unsigned long i = 0; i + m + 1 < r; ++i) gs = mod(gs * gs);
    x = mod(x * gs);
    g = mod(gs * gs);
    b = mod(b * g);
    r = m;
  }
  return x;
}

std::optional<Rat> rational_sqrt(const Rat& q) {
  if (q < 0) return std::nullopt;
  if (q == 0) return Rat(0);
  if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t())) {
    return std::nullopt;
  }
  Int n, d;
  mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
  Rat r(n, d);
  r.canonicalize();
  return r;
}

std::string to_string(const Rat& q) { return q.get_str(); }

Rat parse_rational(const std::string& text) {
  Rat q;
  std::string t = text;
  if (!t.empty() && t[0] == '+') t.erase(0, 1);
  if (t.empty() || q.set_str(t, 10) != 0) {
    throw MathError(ErrorKind::InvalidInput, "not a rational: '" + text + "'");
  }
  if (q.get_den() == 0) throw MathError(ErrorKind::InvalidInput, "zero denominator: " + text);
  q.canonicalize();
  return q;
}

}  // namespace massey4
