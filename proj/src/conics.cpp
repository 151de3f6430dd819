#include "massey4/conics.hpp"

#include <algorithm>
#include <array>

#include "massey4/brauer.hpp"
#include "massey4/localfields.hpp"
#include "massey4/qforms.hpp"

namespace massey4 {

namespace {

using Triple = std::array<Int, 3>;  // (x, y, z) with z^2 = a x^2 + b y^2

// t with t^2 = a mod |b| for squarefree b, |t| <= |b|/2.
Int sqrt_mod_squarefree(const Int& a, const Int& b) {
  Int modulus = 1, t = 0;
  for (const auto& [p, e] : factor(b).factors) {
    auto r = sqrt_mod_prime(a, p);
    if (!r) throw MathError(ErrorKind::VerificationFailed, "descent lost local solubility");
    // CRT: t = t mod modulus, t = r mod p
    Int inv;
    mpz_invert(inv.get_mpz_t(), modulus.get_mpz_t(), p.get_mpz_t());
    Int k = ((*r - t) * inv) % p;
    if (k < 0) k += p;
    t += modulus * k;
    modulus *= p;
  }
  if (2 * t > modulus) t -= modulus;
  return t;
}

Triple legendre(const Int& a, const Int& b, int depth) {
  if (depth > 4096) throw MathError(ErrorKind::SearchBoundExceeded, "conic descent too deep");
  if (a == 1) return {1, 0, 1};
  if (b == 1) return {0, 1, 1};
  if (abs(a) > abs(b)) {
    Triple s = legendre(b, a, depth + 1);
    return {s[1], s[0], s[2]};
  }
  const Int t = sqrt_mod_squarefree(a, b);
  const Int k = (t * t - a) / b;
  const SquareClass k0 = squarefree_class(Rat(k));
  Int m;
  mpz_sqrt(m.get_mpz_t(), Int(k / k0.rep()).get_mpz_t());
  Triple s = legendre(a, k0.rep(), depth + 1);
  // (z + x sqrt a) = (t + sqrt a)(z' + x' sqrt a), y = k0 m y'
  Int z = t * s[2] + a * s[0];
  Int x = s[2] + t * s[0];
  Int y = k0.rep() * m * s[1];
  Int g;
  mpz_gcd(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z.get_mpz_t());
  if (g > 1) {
    x /= g;
    y /= g;
    z /= g;
  }
  return {x, y, z};
}

// Exact LLL (delta = 3/4) for three vectors under <u,v> = sum w_i u_i v_i.
void lll_reduce(std::array<Triple, 3>& b, const Triple& w) {
  auto gram_schmidt = [&](std::array<std::array<Rat, 3>, 3>& mu, std::array<Rat, 3>& bn) {
    std::array<std::array<Rat, 3>, 3> star;  // coordinates of b*_i
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) star[i][k] = Rat(b[i][k]);
      for (int j = 0; j < i; ++j) {
        Rat num = 0;
        for (int k = 0; k < 3; ++k) num += Rat(w[k]) * Rat(b[i][k]) * star[j][k];
        mu[i][j] = num / bn[j];
        for (int k = 0; k < 3; ++k) star[i][k] -= mu[i][j] * star[j][k];
      }
      bn[i] = 0;
      for (int k = 0; k < 3; ++k) bn[i] += Rat(w[k]) * star[i][k] * star[i][k];
    }
  };
  std::array<std::array<Rat, 3>, 3> mu{};
  std::array<Rat, 3> bn{};
  gram_schmidt(mu, bn);
  int k = 1;
  for (int guard = 0; k < 3 && guard < 100000; ++guard) {
    for (int j = k - 1; j >= 0; --j) {
      Rat q = mu[k][j];
      if (abs(q) * 2 > 1) {
        Int r;  // nearest integer
        mpz_fdiv_q(r.get_mpz_t(), Int(2 * q.get_num() + q.get_den()).get_mpz_t(),
                   Int(2 * q.get_den()).get_mpz_t());
        for (int c = 0; c < 3; ++c) b[k][c] -= r * b[j][c];
        gram_schmidt(mu, bn);
      }
    }
    if (bn[k] >= (Rat(3, 4) - mu[k][k - 1] * mu[k][k - 1]) * bn[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      gram_schmidt(mu, bn);
      k = std::max(k - 1, 1);
    }
  }
}

// a x^2 + b y^2 + c z^2 = 0 for pairwise coprime squarefree a, b, c, locally soluble:
// the form's value is divisible by abc on an index-|abc| lattice; search its reduced basis.
std::optional<Triple> ternary_lattice(const Int& a, const Int& b, const Int& c) {
  const Int A = abs(a), B = abs(b), C = abs(c);
  auto root_ratio = [](const Int& num, const Int& den, const Int& mod) -> std::optional<Int> {
    // t with t^2 = num/den mod the squarefree modulus
    Int t = 0, m = 1;
    for (const auto& [p, e] : factor(mod).factors) {
      Int inv;
      if (!mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t())) return std::nullopt;
      auto r = sqrt_mod_prime(Int(num * inv), p);
      if (!r) return std::nullopt;
      Int minv;
      mpz_invert(minv.get_mpz_t(), m.get_mpz_t(), p.get_mpz_t());
      Int k = ((*r - t) * minv) % p;
      if (k < 0) k += p;
      t += m * k;
      m *= p;
    }
    return t;
  };
  auto crt2 = [](const Int& r1, const Int& m1, const Int& r2, const Int& m2) {
    Int inv;
    mpz_invert(inv.get_mpz_t(), m1.get_mpz_t(), m2.get_mpz_t());
    Int k = ((r2 - r1) * inv) % m2;
    if (k < 0) k += m2;
    return Int(r1 + m1 * k);
  };
  auto la = root_ratio(-c, b, A);  // y = la z mod |a|
  auto lb = root_ratio(-c, a, B);  // x = lb z mod |b|
  auto lc = root_ratio(-b, a, C);  // x = lc y mod |c|
  if (!la || !lb || !lc) return std::nullopt;
  const Int y0 = *la;
  const Int x0 = crt2(*lb, B, Int(*lc * y0), C);
  const Int x1 = crt2(Int(0), B, Int(*lc * A), C);
  std::array<Triple, 3> basis{Triple{B * C, 0, 0}, Triple{x1, A, 0}, Triple{x0, y0, 1}};
  lll_reduce(basis, Triple{A, B, C});
  for (int R = 1; R <= 4; ++R) {
    for (int s0 = -R; s0 <= R; ++s0) {
      for (int s1 = -R; s1 <= R; ++s1) {
        for (int s2 = -R; s2 <= R; ++s2) {
          if (std::max({std::abs(s0), std::abs(s1), std::abs(s2)}) != R) continue;
          Triple v;
          for (int k = 0; k < 3; ++k) v[k] = s0 * basis[0][k] + s1 * basis[1][k] + s2 * basis[2][k];
          if (a * v[0] * v[0] + b * v[1] * v[1] + c * v[2] * v[2] == 0) return v;
        }
      }
    }
  }
  return std::nullopt;
}

// z^2 = a x^2 + b y^2 for squarefree a, b.
Triple solve_squarefree_conic(const Int& a, const Int& b) {
  if (a == 1) return {1, 0, 1};
  if (b == 1) return {0, 1, 1};
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  // g (a' x^2 + b' y^2) = z^2 with z = g z'
  if (auto v = ternary_lattice(Int(a / g), Int(b / g), Int(-g))) {
    Triple t{(*v)[0], (*v)[1], Int(g * (*v)[2])};
    Int h;
    mpz_gcd(h.get_mpz_t(), t[0].get_mpz_t(), t[1].get_mpz_t());
    mpz_gcd(h.get_mpz_t(), h.get_mpz_t(), t[2].get_mpz_t());
    if (h > 1) {
      for (auto& x : t) x /= h;
    }
    return t;
  }
  return legendre(a, b, 0);
}

}  // namespace

ConicResult solve_conic(const Rat& a, const Rat& b) {
  if (a == 0 || b == 0) throw MathError(ErrorKind::InvalidInput, "conic coefficients must be nonzero");
  const SquareClass ca = squarefree_class(a), cb = squarefree_class(b);
  std::vector<Int> places{0, 2};
  for (const Int& p : prime_support(Rat(ca.rep() * cb.rep()))) places.push_back(p);
  for (const Int& p : prime_support(Rat(ca.rep()))) places.push_back(p);
  std::sort(places.begin(), places.end());
  places.erase(std::unique(places.begin(), places.end()), places.end());
  ConicResult out;
  for (const Int& p : places) {
    if (hilbert_symbol_qp(Rat(ca.rep()), Rat(cb.rep()), p) < 0) {
      out.obstruction = p;
      return out;
    }
  }
  const Triple s = solve_squarefree_conic(ca.rep(), cb.rep());
  // a = sa^2 ca, b = sb^2 cb
  ConicSolution sol{Rat(s[0]) / square_cofactor(a), Rat(s[1]) / square_cofactor(b), Rat(s[2])};
  if (sol.z * sol.z != a * sol.x * sol.x + b * sol.y * sol.y ||
      (sol.x == 0 && sol.y == 0 && sol.z == 0)) {
    throw MathError(ErrorKind::VerificationFailed, "conic solution failed substitution");
  }
  out.solution = sol;
  return out;
}

EtaleElement solve_rational_norm(const SquareClass& g, const Rat& t) {
  const EtaleAlgebra F = quadratic_algebra(g);
  if (t == 0) throw MathError(ErrorKind::NotAUnit, "norm target 0");
  EtaleElement xi;
  if (g.is_trivial()) {
    xi = F.from_coords({(t + 1) / 2, (t - 1) / 2});
  } else {
    ConicResult r = solve_conic(Rat(g.rep()), t);
    if (!r.solution) {
      throw MathError(ErrorKind::NoSolution,
                      t.get_str() + " is not a norm from Q(sqrt " + g.str() + "); obstruction at " +
                          (*r.obstruction == 0 ? std::string("inf") : r.obstruction->get_str()));
    }
    const auto& s = *r.solution;
    xi = F.from_coords({s.z / s.y, s.x / s.y});
  }
  if (norm_to_q(xi) != t) throw MathError(ErrorKind::VerificationFailed, "rational norm check failed");
  return xi;
}

namespace {

// X, Y in the field K with X^2 - g Y^2 = t.
std::pair<EtaleElement, EtaleElement> solve_over_field(const EtaleAlgebra& K, const SquareClass& g,
                                                       const EtaleElement& t) {
  const Rat rg(g.rep());
  SquareRootResult sq = is_square_with_witness(K.scalar(rg));
  if (sq.is_square) {
    const EtaleElement& s = *sq.root;
    return {(t + K.one()) * Rat(1, 2), (t - K.one()) * (s * Rat(2)).inverse()};
  }
  if (K.num_generators() == 0) {
    EtaleElement xi = solve_rational_norm(g, t.coord(0));
    return {K.scalar(xi.coord(0)), K.scalar(xi.coord(1))};
  }
  if (K.num_generators() > 1) {
    throw MathError(ErrorKind::InvalidInput, "norm equations over quartic bases are not supported");
  }
  const BrauerClass2 obstruction = symbol(K.scalar(rg), t);
  if (!obstruction.is_zero()) {
    throw MathError(ErrorKind::NoSolution,
                    t.str() + " is not a norm from the extension by sqrt " + g.str() +
                        "; obstruction at " + obstruction.support().begin()->str());
  }
  // X^2 - g Y^2 = r t with r rational, from the transfer of t^{-1} <1, -g>.
  const EtaleElement tinv = t.inverse();
  TransferredForm tf = transfer({tinv, tinv * (-rg)});
  auto v = isotropic_vector(tf.diagonal);
  if (!v) throw MathError(ErrorKind::VerificationFailed, "transfer unexpectedly anisotropic");
  EtaleElement X = tf.basis[0] * (*v)[0] + tf.basis[1] * (*v)[1];
  EtaleElement Y = tf.basis[2] * (*v)[2] + tf.basis[3] * (*v)[3];
  EtaleElement rt = (X * X - Y * Y * rg) * tinv;
  if (!rt.is_rational() || rt.coord(0) == 0) {
    throw MathError(ErrorKind::VerificationFailed, "isotropic vector did not give a rational ratio");
  }
  const Rat r = rt.coord(0);
  // r = N(w1) / N(w2) with w1 from Q(sqrt g) and w2 from Q(sqrt(a g)).
  const SquareClass a = K.generator(0);
  const SquareClass ag = a * g;
  const Int n = solve_symbol_conditions({{rg, symbol(rg, r)}, {Rat(ag.rep()), BrauerClass2()}});
  const EtaleElement w1 = solve_rational_norm(g, r * Rat(n));
  const EtaleElement w2 = solve_rational_norm(ag, Rat(n));
  // sqrt(ag) = sqrt a sqrt g / m with a g = ag m^2
  const Rat m = square_cofactor(Rat(a.rep() * g.rep()));
  // In L = K(sqrt g), write elements as P + Q sqrt g with P, Q in K.
  const EtaleElement P1 = K.scalar(w1.coord(0)), Q1 = K.scalar(w1.coord(1));
  const EtaleElement P2 = K.scalar(w2.coord(0)), Q2 = K.root(0) * (w2.coord(1) / m);
  // xi = (X + Y sqrt g) w2 / w1
  auto mul = [&](const EtaleElement& p, const EtaleElement& q, const EtaleElement& p2,
                 const EtaleElement& q2) {
    return std::make_pair(p * p2 + q * q2 * rg, p * q2 + q * p2);
  };
  auto [A, B] = mul(X, Y, P2, Q2);
  const Rat n1 = norm_to_q(w1);
  auto [C, D] = mul(A, B, P1 * (1 / n1), -Q1 * (1 / n1));
  return {C, D};
}

}  // namespace

EtaleElement solve_norm_equation(const EtaleAlgebra& E, const EtaleElement& t, bool) {
  const int n = E.num_generators();
  if (n == 0) throw MathError(ErrorKind::InvalidInput, "norm equation needs a quadratic step");
  const EtaleAlgebra base = E.prefix(n - 1);
  if (t.algebra() != base) throw MathError(ErrorKind::AlgebraMismatch, "norm target not in the base");
  if (!t.is_unit()) throw MathError(ErrorKind::NotAUnit, "norm target must be a unit");
  const SquareClass& g = E.generator(n - 1);
  std::vector<EtaleElement> xs, ys;
  for (std::size_t c = 0; c < base.num_components(); ++c) {
    auto [x, y] = solve_over_field(base.component_field(c), g, t.to_component(c));
    xs.push_back(x);
    ys.push_back(y);
  }
  const EtaleElement X = from_components(base, xs), Y = from_components(base, ys);
  std::vector<Rat> coords(X.coords());
  coords.insert(coords.end(), Y.coords().begin(), Y.coords().end());
  EtaleElement xi = E.from_coords(std::move(coords));
  if (norm(xi, n - 1) != t) throw MathError(ErrorKind::VerificationFailed, "norm equation check failed");
  return xi;
}

}  // namespace massey4
