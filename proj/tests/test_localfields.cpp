#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "massey4/localfields.hpp"

using namespace massey4;

namespace {

SquareClass sc(long n) { return squarefree_class(Rat(n)); }

long ipow(long b, int e) {
  long r = 1;
  while (e--) r *= b;
  return r;
}

// Brute force: z^2 = a x^2 + b y^2 has a solution mod p^k with (x, y) not both divisible by p.
// For squarefree a, b and k = 3 (odd p) or k = 6 (p = 2) this decides p-adic solubility.
int hilbert_by_search(long a, long b, long p) {
  const int k = p == 2 ? 6 : 3;
  const long m = ipow(p, k);
  std::vector<char> is_sq(m, 0);
  for (long z = 0; z < m; ++z) is_sq[z * z % m] = 1;
  for (long x = 0; x < m; ++x) {
    for (long y = 0; y < m; ++y) {
      if (x % p == 0 && y % p == 0) continue;
      long v = (a * x % m * x + b * y % m * y) % m;
      if (v < 0) v += m;
      if (is_sq[v]) return 1;
    }
  }
  return -1;
}

// Elements u + v t of F_25 with t^2 = 2.
bool f25_is_square(int u, int v) {
  for (int x = 0; x < 5; ++x) {
    for (int y = 0; y < 5; ++y) {
      if (((x * x + 2 * y * y) % 5 + 5) % 5 == u && (2 * x * y) % 5 == v) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("local square classes") {
  // 2-adic units are squares iff they are 1 mod 8.
  for (long u = -31; u <= 31; u += 2) {
    const long r = ((u % 8) + 8) % 8;
    CHECK(local_square_class(u, 2).is_trivial() == (r == 1));
  }
  CHECK_FALSE(local_square_class(5, 2).is_trivial());
  CHECK(local_square_class(5, 2) == local_square_class(-3, 2));
  CHECK(local_square_class(2, 7).is_trivial());
  CHECK_FALSE(local_square_class(-3, 0).is_trivial());
  CHECK(local_square_class(Rat(3, 4), 0).is_trivial());
}

TEST_CASE("places above a prime") {
  const EtaleAlgebra F = quadratic_algebra(sc(2));
  const auto p7 = places_above(F, 7);
  REQUIRE(p7.size() == 2);
  for (const auto& v : p7) CHECK(v.local_degree() == 1);
  const auto p5 = places_above(F, 5);
  REQUIRE(p5.size() == 1);
  CHECK(p5[0].local_degree() == 2);
  const auto inf = places_above(F, 0);
  REQUIRE(inf.size() == 2);
  for (const auto& v : inf) CHECK_FALSE(v.is_complex());

  std::mt19937 rng(5);
  const std::vector<long> gens{2, 3, 5, -1, -3, 6, 7, -2, 10, 1, 15, -5};
  std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
  for (int it = 0; it < 80; ++it) {
    const EtaleAlgebra E({sc(gens[pick(rng)]), sc(gens[pick(rng)])});
    for (long p : {0L, 2L, 3L, 5L, 7L, 11L, 13L}) {
      std::size_t total = 0;
      for (const auto& v : places_above(E, p)) total += (v.is_complex() ? 2 : v.local_degree());
      CHECK(total == E.dim());
    }
  }
}

TEST_CASE("hilbert symbol examples") {
  CHECK(hilbert_symbol_qp(-1, -1, 2) == -1);
  CHECK(hilbert_by_search(-1, -1, 2) == -1);
  CHECK(hilbert_symbol_qp(-1, -1, 0) == -1);
  for (long p : {3L, 5L, 7L, 11L}) {
    for (long u = 1; u < 40; ++u) {
      for (long v = 1; v < 10; ++v) {
        if (u % p && v % p) CHECK(hilbert_symbol_qp(u, v, p) == 1);
      }
    }
  }
}

TEST_CASE("hilbert symbol against brute-force solubility") {
  std::vector<long> sf;
  for (long n = -30; n <= 30; ++n) {
    if (n != 0 && sc(n).rep() == n) sf.push_back(n);
  }
  for (long p : {2L, 3L, 5L}) {
    for (long a : sf) {
      for (long b : sf) {
        if (std::abs(a) > 15 && std::abs(b) > 15) continue;
        CHECK(hilbert_symbol_qp(a, b, p) == hilbert_by_search(a, b, p));
      }
    }
  }
}

TEST_CASE("hilbert symbol bilinearity, symmetry, Steinberg") {
  std::mt19937 rng(9);
  std::uniform_int_distribution<long> num(-200, 200), den(1, 60);
  const std::vector<long> primes{0, 2, 3, 5, 7, 11, 13};
  for (int it = 0; it < 400; ++it) {
    Rat a(num(rng), den(rng)), b(num(rng), den(rng)), c(num(rng), den(rng));
    a.canonicalize();
    b.canonicalize();
    c.canonicalize();
    if (a == 0 || b == 0 || c == 0 || a == 1) continue;
    for (long p : primes) {
      CHECK(hilbert_symbol_qp(a, b, p) == hilbert_symbol_qp(b, a, p));
      CHECK(hilbert_symbol_qp(a * c, b, p) == hilbert_symbol_qp(a, b, p) * hilbert_symbol_qp(c, b, p));
      CHECK(hilbert_symbol_qp(a, -a, p) == 1);
      CHECK(hilbert_symbol_qp(a, 1 - a, p) == 1);
    }
  }
}

TEST_CASE("local symbol contracts") {
  // Degree-one places reproduce the rational Hilbert symbol.
  const EtaleAlgebra F = quadratic_algebra(sc(2));
  for (const auto& v : places_above(F, 7)) {
    for (long a : {-1L, 3L, 7L, 14L}) {
      for (long b : {5L, -7L, 21L}) {
        CHECK(local_symbol(F, v, F.scalar(a), F.scalar(b)) == hilbert_symbol_qp(a, b, 7));
      }
    }
  }
  // A local square pairs trivially.
  for (long p : {0L, 2L, 3L, 5L, 7L}) {
    for (const auto& v : places_above(F, p)) {
      CHECK(local_symbol(F, v, F.scalar(9), F.from_coords({1, 1})) == 1);
    }
  }
  // (sqrt2, 5) over the unramified quadratic extension of Q_5: the residue of sqrt2 in F_25 decides.
  const auto p5 = places_above(F, 5);
  REQUIRE(p5.size() == 1);
  const int expected = f25_is_square(0, 1) ? 1 : -1;
  CHECK(local_symbol(F, p5[0], F.root(0), F.scalar(5)) == expected);
  CHECK(expected == -1);
}

TEST_CASE("reciprocity and projection over quadratic and biquadratic algebras") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> coef(-6, 6), pick(0, 11), n_gens(1, 2);
  const std::vector<long> ts{2, 3, 5, -1, -3, 6, 7, -2, 10, 1, -7, 15};
  int tot = 0;
  while (tot < 150) {
    std::vector<SquareClass> g;
    const int n = n_gens(rng);
    for (int i = 0; i < n; ++i) g.push_back(sc(ts[pick(rng)]));
    const EtaleAlgebra E(g);
    auto rnd = [&] {
      std::vector<Rat> c(E.dim());
      for (Rat& x : c) x = coef(rng);
      return E.from_coords(c);
    };
    const EtaleElement pi = rnd(), rho = rnd();
    const long u = coef(rng) * 3 + 1;
    if (!pi.is_unit() || !rho.is_unit()) continue;
    ++tot;
    std::vector<int> odd(E.num_components(), 0);
    for (const Int& p : symbol_support(pi, rho)) {
      for (const auto& v : places_above(E, p)) {
        if (local_symbol(E, v, pi, rho) < 0) odd[v.component] ^= 1;
      }
    }
    for (int o : odd) CHECK(o == 0);
    // Projection formula: prod_{v | p} (pi, u)_v = (N pi, u)_p for rational u.
    const Rat N = norm_to_q(pi);
    for (const Int& p : symbol_support(pi, E.scalar(u))) {
      int s = 1;
      for (const auto& v : places_above(E, p)) s *= local_symbol(E, v, pi, E.scalar(u));
      CHECK(s == hilbert_symbol_qp(N, u, p));
    }
  }
}
