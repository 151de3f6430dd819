#include "massey4/qforms.hpp"

#include <algorithm>
#include <numeric>

#include "massey4/brauer.hpp"
#include "massey4/conics.hpp"
#include "massey4/localfields.hpp"

namespace massey4 {

namespace {

std::vector<Int> form_places(const RationalForm& form) {
  std::vector<Int> places{0, 2};
  for (const Rat& q : form) {
    for (const Int& p : prime_support(q)) places.push_back(p);
  }
  std::sort(places.begin(), places.end());
  places.erase(std::unique(places.begin(), places.end()), places.end());
  return places;
}

int hasse_invariant(const RationalForm& form, const Int& p) {
  int c = 1;
  for (std::size_t i = 0; i < form.size(); ++i) {
    for (std::size_t j = i + 1; j < form.size(); ++j) c *= hilbert_symbol_qp(form[i], form[j], p);
  }
  return c;
}

Rat discriminant(const RationalForm& form) {
  return std::accumulate(form.begin(), form.end(), Rat(1), [](Rat a, const Rat& b) { return a * b; });
}

Rat bilinear(const RationalForm& form, const std::vector<Rat>& x, const std::vector<Rat>& y) {
  Rat s = 0;
  for (std::size_t i = 0; i < form.size(); ++i) s += form[i] * x[i] * y[i];
  return s;
}

// Rationals of small height in a fixed order: 0, 1, 2, 1/2, 3, 1/3, 3/2, 2/3, ...
std::vector<Rat> small_rationals(std::size_t count) {
  std::vector<Rat> out{Rat(0)};
  for (long h = 2; out.size() < count; ++h) {
    for (long num = h - 1; num >= 1 && out.size() < count; --num) {
      const long den = h - num;
      if (std::gcd(num, den) != 1) continue;
      out.emplace_back(num, den);
    }
  }
  for (auto& q : out) q.canonicalize();
  return out;
}

void check_vector(const RationalForm& form, const std::vector<Rat>& v) {
  const bool nonzero = std::any_of(v.begin(), v.end(), [](const Rat& x) { return x != 0; });
  if (!nonzero || evaluate(form, v) != 0) {
    throw MathError(ErrorKind::VerificationFailed, "isotropic vector failed substitution");
  }
}

}  // namespace

Rat evaluate(const RationalForm& form, const std::vector<Rat>& v) { return bilinear(form, v, v); }

TransferredForm transfer(const std::vector<EtaleElement>& form) {
  TransferredForm out;
  for (const EtaleElement& lam : form) {
    const EtaleAlgebra& F = lam.algebra();
    if (F.num_generators() != 1) throw MathError(ErrorKind::AlgebraMismatch, "transfer needs F_a");
    const Rat& X = lam.coord(0);
    const Rat& Y = lam.coord(1);
    if (Y == 0) {
      out.diagonal.push_back(2 * X);
      out.diagonal.push_back(-2 * X);
      out.basis.push_back(F.one() + F.root(0));
      out.basis.push_back(F.one() - F.root(0));
    } else {
      out.diagonal.push_back(Y);
      out.diagonal.push_back(-Y * norm_to_q(lam));
      out.basis.push_back(F.one());
      out.basis.push_back(F.scalar(-X) + F.root(0) * Y);
    }
  }
  return out;
}

bool is_locally_isotropic(const RationalForm& form, const Int& p) {
  const std::size_t n = form.size();
  if (p == 0) {
    const bool pos = std::any_of(form.begin(), form.end(), [](const Rat& q) { return q > 0; });
    const bool neg = std::any_of(form.begin(), form.end(), [](const Rat& q) { return q < 0; });
    return pos && neg;
  }
  if (n <= 1) return false;
  const Rat d = discriminant(form);
  if (n == 2) return local_square_class(-d, p).is_trivial();
  const int c = hasse_invariant(form, p);
  if (n == 3) return c == hilbert_symbol_qp(-1, -d, p);
  if (n == 4) return !local_square_class(d, p).is_trivial() || c == hilbert_symbol_qp(-1, -1, p);
  return true;
}

bool is_isotropic(const RationalForm& form) {
  if (form.size() <= 1) return false;
  for (const Int& p : form_places(form)) {
    if (!is_locally_isotropic(form, p)) return false;
  }
  return true;
}

bool is_hyperbolic(const RationalForm& form) {
  const std::size_t n = form.size();
  if (n % 2) return false;
  const std::size_t m = n / 2;
  const auto positive = std::count_if(form.begin(), form.end(), [](const Rat& q) { return q > 0; });
  if (static_cast<std::size_t>(positive) != m) return false;
  if (n == 0) return true;
  if (squarefree_class(discriminant(form)) != squarefree_class(Rat(m % 2 ? -1 : 1))) return false;
  const bool odd_pairs = (m * (m - 1) / 2) % 2 == 1;
  for (const Int& p : form_places(form)) {
    const int expected = odd_pairs ? hilbert_symbol_qp(-1, -1, p) : 1;
    if (hasse_invariant(form, p) != expected) return false;
  }
  return true;
}

std::optional<std::vector<Rat>> isotropic_vector(const RationalForm& form) {
  const std::size_t n = form.size();
  if (n > 6) throw MathError(ErrorKind::InvalidInput, "isotropic_vector supports dimension <= 6");
  for (const Rat& q : form) {
    if (q == 0) throw MathError(ErrorKind::InvalidInput, "degenerate form");
  }
  if (n <= 1) return std::nullopt;
  std::vector<Rat> v(n, Rat(0));
  if (n == 2) {
    auto r = rational_sqrt(-form[0] / form[1]);
    if (!r) return std::nullopt;
    v = {Rat(1), *r};
  } else if (n == 3) {
    ConicResult c = solve_conic(-form[0] * form[2], -form[1] * form[2]);
    if (!c.solution) return std::nullopt;
    v = {c.solution->x, c.solution->y, c.solution->z / form[2]};
  } else if (n == 4) {
    if (!is_isotropic(form)) return std::nullopt;
    const RationalForm left{form[0], form[1]}, right{form[2], form[3]};
    if (auto w = isotropic_vector(left)) {
      v = {(*w)[0], (*w)[1], Rat(0), Rat(0)};
    } else if (auto w = isotropic_vector(right)) {
      v = {Rat(0), Rat(0), (*w)[0], (*w)[1]};
    } else {
      // A common value r of <q1,q2> and -<q3,q4>, fixed by its local symbols.
      const Rat t1 = -form[0] * form[1], t2 = -form[2] * form[3];
      const Rat r(solve_symbol_conditions({{t1, symbol(t1, form[0])}, {t2, symbol(t2, -form[2])}}));
      auto a = isotropic_vector({form[0], form[1], -r});
      auto b = isotropic_vector({form[2], form[3], r});
      if (!a || !b || (*a)[2] == 0 || (*b)[2] == 0) {
        throw MathError(ErrorKind::VerificationFailed, "binary subforms do not represent the common value");
      }
      v = {(*a)[0] / (*a)[2], (*a)[1] / (*a)[2], (*b)[0] / (*b)[2], (*b)[1] / (*b)[2]};
    }
  } else {
    if (!is_isotropic(form)) return std::nullopt;
    // Merge the last two coordinates: q_{n-1} k^2 + q_n.
    bool found = false;
    for (const Rat& k : small_rationals(static_cast<std::size_t>(config().budget))) {
      const Rat w = form[n - 2] * k * k + form[n - 1];
      if (w == 0) {
        v[n - 2] = k;
        v[n - 1] = 1;
        found = true;
        break;
      }
      RationalForm reduced(form.begin(), form.end() - 2);
      reduced.push_back(w);
      if (!is_isotropic(reduced)) continue;
      auto u = isotropic_vector(reduced);
      if (!u) continue;
      for (std::size_t i = 0; i + 2 < n; ++i) v[i] = (*u)[i];
      v[n - 2] = (*u)[n - 2] * k;
      v[n - 1] = (*u)[n - 2];
      found = true;
      break;
    }
    if (!found) throw MathError(ErrorKind::SearchBoundExceeded, "no isotropic reduction found");
  }
  check_vector(form, v);
  return v;
}

AlbertResult albert_solve(const SquareClass& a, const EtaleElement& pi, const EtaleElement& mu) {
  const EtaleAlgebra& F = pi.algebra();
  if (F.num_generators() != 1 || F.generator(0) != a || mu.algebra() != F) {
    throw MathError(ErrorKind::AlgebraMismatch, "albert_find_y expects elements of F_a");
  }
  const BrauerClass2 B = symbol(pi, mu);
  if (!corestriction(B, 0).is_zero()) {
    throw MathError(ErrorKind::PreconditionFailed, "corestriction of (pi, mu) is nonzero");
  }
  // Square pi or mu: y = 1 with z - s w = 1, z + s w = 1/mu, or with z = 1/m, w = 0.
  const SquareRootResult pi_root = is_square_with_witness(pi);
  if (pi_root.is_square && pi_root.root->is_unit()) {
    const EtaleElement& s = *pi_root.root;
    const EtaleElement inv = mu.inverse();
    return {1, std::make_pair((inv + F.one()) * Rat(1, 2), (inv - F.one()) * (s * Rat(2)).inverse())};
  }
  const SquareRootResult mu_root = is_square_with_witness(mu);
  if (mu_root.is_square && mu_root.root->is_unit()) return {1, std::make_pair(mu_root.root->inverse(), F.zero())};

  // mu (z^2 - pi w^2) is rational along an isotropic vector of s_*<mu, -pi mu>.
  TransferredForm tf = transfer({mu, -(pi * mu)});
  auto v0 = isotropic_vector(tf.diagonal);
  if (!v0) {
    if (B.is_zero()) return {1, std::nullopt};
    throw MathError(ErrorKind::VerificationFailed, "transfer of <mu, -pi mu> is anisotropic");
  }
  std::vector<std::vector<Rat>> candidates{*v0};
  // Further isotropic vectors v0 phi(u) - 2 B(v0, u) u.
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      std::vector<Rat> u(4, Rat(0));
      u[i] += 1;
      u[j] += j > i ? 1 : 0;
      const Rat fu = evaluate(tf.diagonal, u), b = bilinear(tf.diagonal, *v0, u);
      std::vector<Rat> v(4);
      for (int k = 0; k < 4; ++k) v[k] = fu * (*v0)[k] - 2 * b * u[k];
      if (std::any_of(v.begin(), v.end(), [](const Rat& x) { return x != 0; })) candidates.push_back(v);
    }
  }
  // Smallest admissible squarefree y among the candidates.
  std::optional<AlbertResult> best;
  std::optional<MathError> budget_error;
  for (const auto& v : candidates) {
    EtaleElement z = tf.basis[0] * v[0] + tf.basis[1] * v[1];
    EtaleElement w = tf.basis[2] * v[2] + tf.basis[3] * v[3];
    EtaleElement y = mu * (z * z - pi * w * w);
    if (!y.is_rational() || y.coord(0) == 0) continue;
    try {
      const SquareClass cls = squarefree_class(y.coord(0));
      if (best && abs(cls.rep()) >= abs(best->y)) continue;
      if (!symbol(pi, mu * Rat(cls.rep())).is_zero()) continue;
      const Rat r = square_cofactor(y.coord(0));
      best = AlbertResult{cls.rep(), std::make_pair(z * (1 / r), w * (1 / r))};
    } catch (const MathError& e) {
      // Candidates too large to factor are skipped.
      if (e.kind() != ErrorKind::FactorizationBoundExceeded) throw;
      if (!budget_error) budget_error = e;
    }
  }
  if (best) return *best;
  if (B.is_zero()) return {1, std::nullopt};
  if (budget_error) throw *budget_error;
  throw MathError(ErrorKind::VerificationFailed, "no admissible y from the Albert form");
}

Int albert_find_y(const SquareClass& a, const EtaleElement& pi, const EtaleElement& mu) {
  return albert_solve(a, pi, mu).y;
}

}  // namespace massey4
