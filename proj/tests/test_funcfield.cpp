#include <random>

#include "doctest.h"
#include "massey4/funcfield.hpp"

using namespace massey4;

namespace {

SquareClass sc(long n) { return squarefree_class(Rat(n)); }

bool nonzero_in_each_component(const BivariatePoly& f) {
  for (std::size_t k = 0; k < f.algebra().num_components(); ++k) {
    if (f.to_component(k).is_zero()) return false;
  }
  return true;
}

bool same_class(const EtaleElement& x, const EtaleElement& y) { return is_square_with_witness(x * y).is_square; }

struct Gen {
  std::mt19937 rng;
  explicit Gen(unsigned seed) : rng(seed) {}
  int ri(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  EtaleElement coef(const EtaleAlgebra& K) {
    std::vector<Rat> c(K.dim());
    for (Rat& x : c) x = ri(-4, 4);
    return K.from_coords(c);
  }
  // Product of up to three lines, some passing through P, times a unit constant.
  BivariatePoly poly(const EtaleAlgebra& K, const Rat& p1, const Rat& p2) {
    EtaleElement k;
    do k = coef(K); while (!k.is_unit());
    BivariatePoly f = BivariatePoly::constant(k);
    const int lines = ri(0, 3);
    for (int i = 0; i < lines; ++i) {
      const EtaleElement l1 = coef(K), l2 = coef(K);
      const bool through = ri(0, 2) == 0;
      const EtaleElement l0 = through ? -(l1 * p1 + l2 * p2) : coef(K);
      if (l1.is_zero() && l2.is_zero()) continue;
      f = f * BivariatePoly::linear(l0, l1, l2);
    }
    return f;
  }
};

}  // namespace

TEST_CASE("valuation examples") {
  const EtaleAlgebra Q;
  const Rat c = 3;
  const BivariatePoly q = BivariatePoly::x1(Q).pow(2) - BivariatePoly::x2(Q).pow(2) * Q.scalar(c);
  const BivariatePoly u = BivariatePoly::x1(Q) + BivariatePoly::constant(Q, 5);
  const DivisorSpec D = DivisorSpec::binary_quadratic(Q.one(), Q.zero(), Q.scalar(-c));
  CHECK(valuation_along(BivariateRat(q.pow(3) * u), D) == 3);
  CHECK(valuation_along(BivariateRat(u, q.pow(2)), D) == -2);
  CHECK(valuation_along(BivariateRat(BivariatePoly::constant(Q, 7)), D) == 0);

  const EtaleAlgebra Fa = quadratic_algebra(sc(5));
  const EtaleElement a1 = Fa.from_coords({1, 2}), a2 = Fa.from_coords({3, -1});
  const Rat u1 = 2;
  const BivariatePoly X1 = BivariatePoly::x1(Fa), X2 = BivariatePoly::x2(Fa);
  const BivariatePoly h1 = X1 * a1 + X2 * (a2 * c), h2 = X2 * a1 + X1 * a2, h = h1 + h2 * Fa.scalar(u1);
  const DivisorSpec D3 = DivisorSpec::line(h.coefficient(0, 0), h.coefficient(1, 0), h.coefficient(0, 1));
  CHECK(valuation_along(BivariateRat(h2), D3) == 0);
  CHECK(valuation_along(BivariateRat(h * h2), D3) == 1);
}

TEST_CASE("conic components split exactly when c is a square") {
  CHECK(DivisorSpec::conic_components(quadratic_algebra(sc(3)), 3).size() == 2);
  CHECK(DivisorSpec::conic_components(quadratic_algebra(sc(3)), 12).size() == 2);
  CHECK(DivisorSpec::conic_components(quadratic_algebra(sc(3)), 5).size() == 1);
  CHECK(DivisorSpec::conic_components(EtaleAlgebra(), 7).size() == 1);
}

TEST_CASE("residues of the pipeline class at D1, D2, D3") {
  Gen g(5);
  int cases = 0;
  while (cases < 60) {
    const SquareClass a = sc(g.ri(-12, 12) | 1), d = sc(g.ri(-12, 12) | 1);
    const Rat u1 = g.ri(-6, 6), u2 = g.ri(1, 5);
    const Rat c = u1 * u1 - Rat(d.rep()) * u2 * u2;
    if (c == 0 || rational_sqrt(c)) continue;
    const EtaleAlgebra Fa = quadratic_algebra(a);
    const EtaleElement a1 = Fa.from_coords({g.ri(-5, 5), g.ri(-5, 5)});
    const EtaleElement a2 = Fa.from_coords({g.ri(-5, 5), g.ri(-5, 5)});
    if (a1.coord(0) * a2.coord(1) == a1.coord(1) * a2.coord(0)) continue;
    const EtaleElement alpha = a1 * a1 - a2 * a2 * c;
    if (!alpha.is_unit()) continue;
    ++cases;
    const BivariatePoly X1 = BivariatePoly::x1(Fa), X2 = BivariatePoly::x2(Fa);
    const BivariatePoly f = X1 * X1 - X2 * X2 * Fa.scalar(c);
    const BivariatePoly h1 = X1 * a1 + X2 * (a2 * c), h2 = X2 * a1 + X1 * a2, h = h1 + h2 * Fa.scalar(u1);
    const BivariateRat gg(h * Fa.scalar(2), h2);
    CHECK(f * alpha == h1 * h1 - h2 * h2 * Fa.scalar(c));
    for (std::size_t k = 0; k < Fa.num_components(); ++k) {
      const EtaleAlgebra K = Fa.component_field(k);
      const BivariateRat af = BivariateRat(f * alpha).to_component(k), gk = gg.to_component(k);
      const BivariateRat dk = BivariateRat(BivariatePoly::constant(K, Rat(d.rep())));
      const BivariateRat hk = BivariateRat(h).to_component(k);
      const std::vector<SymbolTerm> B{{af, gk}, {dk, hk}};
      const BivariateRat expect = BivariateRat(BivariatePoly::constant(K, 2 * u1)) +
                                  BivariateRat(BivariatePoly::x1(K) * K.scalar(2), BivariatePoly::x2(K));
      for (const DivisorSpec& D1 : DivisorSpec::conic_components(K, c)) {
        CHECK(residue_of_sum(B, D1) == restrict_to(expect, D1));
        CHECK(residue_symbol(af, gk, D1) == restrict_to(expect, D1));
      }
      const BivariatePoly h2k = h2.to_component(k), h_k = h.to_component(k);
      const DivisorSpec D2 = DivisorSpec::line(h2k.coefficient(0, 0), h2k.coefficient(1, 0), h2k.coefficient(0, 1));
      const DivisorSpec D3 = DivisorSpec::line(h_k.coefficient(0, 0), h_k.coefficient(1, 0), h_k.coefficient(0, 1));
      CHECK(residue_symbol(af, gk, D2).is_trivial());
      CHECK(residue_of_sum(B, D2).is_trivial());
      CHECK(residue_of_sum(B, D3).is_trivial());
    }
  }
}

TEST_CASE("units along D have trivial tame symbol") {
  const EtaleAlgebra Q;
  const DivisorSpec D = DivisorSpec::line(Q.scalar(1), Q.scalar(2), Q.scalar(-1));
  const BivariateRat f(BivariatePoly::x1(Q) + BivariatePoly::constant(Q, 3));
  const BivariateRat g(BivariatePoly::x2(Q) * BivariatePoly::x1(Q) + BivariatePoly::constant(Q, -2));
  CHECK(residue_symbol(f, g, D).is_trivial());
}

TEST_CASE("specialization examples") {
  const EtaleAlgebra Q;
  const BivariateRat x1(BivariatePoly::x1(Q));
  CHECK(same_class(specialize_class1(x1, {0, 0}), Q.scalar(-1)));
  CHECK(specialize_class2(x1, x1, {0, 0}) == symbol(Rat(-1), Rat(-1)));
  CHECK(same_class(specialize_class1(BivariateRat(BivariatePoly::constant(Q, 7)), {2, 3}), Q.scalar(7)));
  CHECK(specialize_class2(x1, BivariateRat(BivariatePoly::constant(Q, 1)), {0, 0}).is_zero());

  const BivariatePoly f = BivariatePoly::x1(Q).pow(2) + BivariatePoly::x2(Q) * Q.scalar(3) + BivariatePoly::constant(Q, 1);
  const BivariatePoly g = BivariatePoly::x1(Q) * BivariatePoly::x2(Q) + BivariatePoly::constant(Q, 5);
  const ParamSystem P{2, -1, false};
  CHECK(same_class(specialize_class1(BivariateRat(f), P), f.evaluate(2, -1)));
  CHECK(specialize_class2(BivariateRat(f), BivariateRat(g), P) == symbol(f.evaluate(2, -1), g.evaluate(2, -1)));
}

TEST_CASE("specialization: multiplicativity, order independence, corestriction") {
  Gen g(31);
  int done = 0;
  while (done < 300) {
    const SquareClass a = sc(std::vector<long>{2, -1, 3, 5, -7, 1}[g.ri(0, 5)]);
    const EtaleAlgebra Fa = quadratic_algebra(a);
    const Rat p1 = g.ri(-3, 3), p2 = g.ri(-3, 3);
    const BivariatePoly f = g.poly(Fa, p1, p2), h = g.poly(Fa, p1, p2);
    if (!nonzero_in_each_component(f * h)) continue;
    ++done;
    for (bool swapped : {false, true}) {
      const ParamSystem ps{p1, p2, swapped};
      const EtaleElement sf = specialize_class1(BivariateRat(f), ps), sh = specialize_class1(BivariateRat(h), ps);
      CHECK(same_class(specialize_class1(BivariateRat(f * h), ps), sf * sh));
      CHECK(same_class(specialize_class1(BivariateRat(f, h), ps), sf * sh));
      if (f.evaluate(p1, p2).is_unit()) CHECK(same_class(sf, f.evaluate(p1, p2)));
    }
    // Corestriction: N(s(r), s(g)) = s(r, N g) for r with rational coefficients.
    const EtaleAlgebra Q;
    const BivariatePoly r = g.poly(Q, p1, p2);
    const BivariatePoly r_up = r.map(Fa, [&](const EtaleElement& x) { return Fa.scalar(x.coord(0)); });
    const BivariatePoly Nf = (f * f.conj(0)).map(Q, [&](const EtaleElement& x) { return Q.scalar(x.coord(0)); });
    const ParamSystem ps{p1, p2, false};
    const BrauerClass2 up = specialize_class2(BivariateRat(r_up), BivariateRat(f), ps);
    const BrauerClass2 down = specialize_class2(BivariateRat(r), BivariateRat(Nf), ps);
    CHECK(corestriction(up, 0) == down);
  }
}
