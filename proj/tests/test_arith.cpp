#include <random>

#include "doctest.h"
#include "massey4/arith.hpp"

using namespace massey4;

namespace {

// Naive trial division, independent of the library's factoring.
std::vector<std::pair<long, unsigned>> trial_factor(long n) {
  std::vector<std::pair<long, unsigned>> out;
  n = std::labs(n);
  for (long p = 2; p * p <= n; ++p) {
    unsigned e = 0;
    while (n % p == 0) n /= p, ++e;
    if (e) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

// Coprime num, den.
long squarefree_oracle(long num, long den) {
  long rep = (num < 0) != (den < 0) ? -1 : 1;
  for (long m : {num, den}) {
    for (auto [p, e] : trial_factor(m)) {
      if (e % 2) rep *= p;
    }
  }
  return rep;
}

int legendre_by_enumeration(long a, long p) {
  a = ((a % p) + p) % p;
  if (a == 0) return 0;
  for (long x = 1; x < p; ++x) {
    if (x * x % p == a) return 1;
  }
  return -1;
}

}  // namespace

TEST_CASE("factor examples") {
  FactoredInt one = factor(1);
  CHECK(one.sign == 1);
  CHECK(one.factors.empty());

  FactoredInt m12 = factor(-12);
  CHECK(m12.sign == -1);
  REQUIRE(m12.factors.size() == 2);
  CHECK(m12.factors[0] == std::pair<Int, unsigned>{2, 2});
  CHECK(m12.factors[1] == std::pair<Int, unsigned>{3, 1});

  FactoredInt f = factor(9991);
  const auto oracle = trial_factor(9991);
  REQUIRE(f.factors.size() == oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    CHECK(f.factors[i].first == oracle[i].first);
    CHECK(f.factors[i].second == oracle[i].second);
  }
}

TEST_CASE("factor round trip and rho beyond trial division") {
  const Int p("1000000007"), q("998244353"), r("1000000000039");
  const Int n = p * p * q * r * Int(-6);
  FactoredInt f = factor(n);
  CHECK(f.value() == n);
  for (std::size_t i = 0; i + 1 < f.factors.size(); ++i) CHECK(f.factors[i].first < f.factors[i + 1].first);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const long v = static_cast<long>(rng() % 2000000) - 1000000;
    if (v == 0) continue;
    CHECK(factor(v).value() == v);
  }
}

TEST_CASE("factor bound surfaces as an error") {
  Config cfg;
  cfg.factor_digits = 20;
  ScopedConfig scope(cfg);
  clear_factor_hints();
  const Int big = Int("1000000000000000003") * Int("1000000000000000009");
  CHECK_THROWS_AS(factor(big), MathError);
  try {
    factor(big);
  } catch (const MathError& e) {
    CHECK(e.kind() == ErrorKind::FactorizationBoundExceeded);
  }
}

TEST_CASE("squarefree_class examples") {
  CHECK(squarefree_class(18).rep() == 2);
  CHECK(squarefree_class(Rat(-4, 9)).rep() == -1);
  CHECK(squarefree_class(Rat(50, 27)).rep() == squarefree_oracle(50, 27));
  CHECK(squarefree_class(Rat(50, 27)).rep() == 6);
  CHECK_THROWS_AS(squarefree_class(0), MathError);
}

TEST_CASE("squarefree_class properties") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<long> num(-3000, 3000), den(1, 400);
  for (int i = 0; i < 500; ++i) {
    long a = num(rng), b = num(rng);
    if (a == 0 || b == 0) continue;
    Rat q(a, den(rng)), r(b, den(rng));
    q.canonicalize();
    r.canonicalize();
    CHECK(squarefree_class(q * r) == squarefree_class(q) * squarefree_class(r));
    CHECK(squarefree_class(q * q).is_trivial());
    CHECK(squarefree_class(q).rep() == squarefree_oracle(q.get_num().get_si(), q.get_den().get_si()));
    CHECK(q / square_cofactor(q) / square_cofactor(q) == Rat(squarefree_class(q).rep()));
  }
}

TEST_CASE("kronecker examples and multiplicativity") {
  CHECK(kronecker_symbol(2, 7) == legendre_by_enumeration(2, 7));
  CHECK(kronecker_symbol(2, 7) == 1);
  CHECK(kronecker_symbol(3, 7) == legendre_by_enumeration(3, 7));
  CHECK(kronecker_symbol(3, 7) == -1);
  CHECK(kronecker_symbol(7, 7) == 0);
  for (long p : {3L, 5L, 7L, 11L, 13L, 101L, 997L}) {
    for (long a = -40; a <= 40; ++a) {
      CHECK(kronecker_symbol(a, p) == legendre_by_enumeration(a, p));
      for (long b = -5; b <= 5; ++b) {
        CHECK(kronecker_symbol(a, p) * kronecker_symbol(b, p) == kronecker_symbol(a * b, p));
      }
    }
  }
}

TEST_CASE("sqrt_mod_prime and rational_sqrt") {
  for (long p : {3L, 5L, 13L, 17L, 97L, 65537L}) {
    for (long a = 1; a < 60; ++a) {
      auto r = sqrt_mod_prime(a, p);
      CHECK(r.has_value() == (legendre_by_enumeration(a, p) >= 0));
      if (r) CHECK((*r * *r - a) % p == 0);
    }
  }
  CHECK(*rational_sqrt(Rat(49, 4)) == Rat(7, 2));
  CHECK_FALSE(rational_sqrt(Rat(2)).has_value());
  CHECK_FALSE(rational_sqrt(Rat(-4)).has_value());
}

TEST_CASE("parse_rational") {
  CHECK(parse_rational("-6/4") == Rat(-3, 2));
  CHECK(parse_rational("12") == 12);
  CHECK_THROWS_AS(parse_rational("1/0"), MathError);
  CHECK_THROWS_AS(parse_rational("abc"), MathError);
  CHECK(to_string(Rat(-3, 2)) == "-3/2");
}
