#include "massey4/funcfield.hpp"

#include <algorithm>
#include <sstream>

namespace massey4 {

// ---------------------------------------------------------------------------
// BivariatePoly

void BivariatePoly::add_term(const Exponent& e, const EtaleElement& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

BivariatePoly BivariatePoly::constant(const EtaleElement& c) {
  BivariatePoly p(c.algebra());
  p.add_term({0, 0}, c);
  return p;
}

BivariatePoly BivariatePoly::x1(const EtaleAlgebra& K) {
  BivariatePoly p(K);
  p.add_term({1, 0}, K.one());
  return p;
}

BivariatePoly BivariatePoly::x2(const EtaleAlgebra& K) {
  BivariatePoly p(K);
  p.add_term({0, 1}, K.one());
  return p;
}

BivariatePoly BivariatePoly::linear(const EtaleElement& l0, const EtaleElement& l1, const EtaleElement& l2) {
  BivariatePoly p(l0.algebra());
  p.add_term({0, 0}, l0);
  p.add_term({1, 0}, l1);
  p.add_term({0, 1}, l2);
  return p;
}

int BivariatePoly::total_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e.first + e.second);
  return d;
}

EtaleElement BivariatePoly::coefficient(int i, int j) const {
  auto it = terms_.find({i, j});
  return it == terms_.end() ? algebra_.zero() : it->second;
}

BivariatePoly BivariatePoly::operator+(const BivariatePoly& o) const {
  BivariatePoly r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

BivariatePoly BivariatePoly::operator-() const {
  BivariatePoly r(algebra_);
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
  return r;
}

BivariatePoly BivariatePoly::operator-(const BivariatePoly& o) const { return *this + (-o); }

BivariatePoly BivariatePoly::operator*(const BivariatePoly& o) const {
  BivariatePoly r(algebra_);
  for (const auto& [e, c] : terms_) {
    for (const auto& [f, d] : o.terms_) r.add_term({e.first + f.first, e.second + f.second}, c * d);
  }
  return r;
}

BivariatePoly BivariatePoly::operator*(const EtaleElement& k) const {
  BivariatePoly r(algebra_);
  for (const auto& [e, c] : terms_) r.add_term(e, c * k);
  return r;
}

BivariatePoly BivariatePoly::pow(unsigned e) const {
  BivariatePoly r = constant(algebra_.one()), b = *this;
  for (; e; e >>= 1) {
    if (e & 1u) r = r * b;
    if (e > 1) b = b * b;
  }
  return r;
}

EtaleElement BivariatePoly::evaluate(const Rat& p1, const Rat& p2) const {
  EtaleElement s = algebra_.zero();
  for (const auto& [e, c] : terms_) {
    Rat m = 1;
    for (int i = 0; i < e.first; ++i) m *= p1;
    for (int j = 0; j < e.second; ++j) m *= p2;
    s += c * m;
  }
  return s;
}

BivariatePoly BivariatePoly::shift(const Rat& p1, const Rat& p2) const {
  const BivariatePoly y1 = x1(algebra_) + constant(algebra_, p1);
  const BivariatePoly y2 = x2(algebra_) + constant(algebra_, p2);
  BivariatePoly r(algebra_);
  for (const auto& [e, c] : terms_) r = r + y1.pow(e.first) * y2.pow(e.second) * c;
  return r;
}

BivariatePoly BivariatePoly::swap_variables() const {
  BivariatePoly r(algebra_);
  for (const auto& [e, c] : terms_) r.terms_.emplace(Exponent{e.second, e.first}, c);
  return r;
}

BivariatePoly BivariatePoly::map(const EtaleAlgebra& target,
                                 const std::function<EtaleElement(const EtaleElement&)>& fn) const {
  BivariatePoly r(target);
  for (const auto& [e, c] : terms_) r.add_term(e, fn(c));
  return r;
}

BivariatePoly BivariatePoly::to_component(std::size_t c) const {
  return map(algebra_.component_field(c), [c](const EtaleElement& x) { return x.to_component(c); });
}

BivariatePoly BivariatePoly::conj(int i) const {
  return map(algebra_, [i](const EtaleElement& x) { return x.conj(i); });
}

std::optional<BivariatePoly> BivariatePoly::divide_exact(const BivariatePoly& d) const {
  if (d.is_zero()) throw MathError(ErrorKind::InvalidInput, "division by the zero polynomial");
  // A single polynomial is a Groebner basis of its ideal, so lex division decides membership.
  const auto& [ld, lc] = *d.terms_.rbegin();
  const EtaleElement lc_inv = lc.inverse();
  BivariatePoly p = *this, q(algebra_);
  while (!p.is_zero()) {
    const auto [lp, c] = *p.terms_.rbegin();
    if (lp.first < ld.first || lp.second < ld.second) return std::nullopt;
    BivariatePoly mono(algebra_);
    mono.add_term({lp.first - ld.first, lp.second - ld.second}, c * lc_inv);
    q = q + mono;
    p = p - mono * d;
  }
  return q;
}

std::string BivariatePoly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    os << "(" << it->second.str() << ")";
    if (it->first.first) os << "*x1^" << it->first.first;
    if (it->first.second) os << "*x2^" << it->first.second;
  }
  return os.str();
}

bool operator==(const BivariatePoly& a, const BivariatePoly& b) {
  return a.algebra_ == b.algebra_ && a.terms_ == b.terms_;
}

// ---------------------------------------------------------------------------
// BivariateRat

BivariateRat::BivariateRat(BivariatePoly num)
    : num_(std::move(num)), den_(BivariatePoly::constant(num_.algebra(), 1)) {}

BivariateRat::BivariateRat(BivariatePoly num, BivariatePoly den) : num_(std::move(num)), den_(std::move(den)) {
  if (num_.algebra() != den_.algebra()) throw MathError(ErrorKind::AlgebraMismatch, "numerator/denominator");
  normalize();
}

void BivariateRat::normalize() {
  if (den_.is_zero()) throw MathError(ErrorKind::InvalidInput, "zero denominator");
  if (num_.is_zero()) {
    den_ = BivariatePoly::constant(den_.algebra(), 1);
    return;
  }
  // Rational content: make the leading denominator coefficient 1 when it is rational.
  const EtaleElement& lc = den_.terms().rbegin()->second;
  if (lc.is_rational() && lc.coord(0) != 1) {
    const EtaleElement inv = den_.algebra().scalar(1 / lc.coord(0));
    num_ = num_ * inv;
    den_ = den_ * inv;
  }
  if (!den_.algebra().is_field()) return;
  if (auto q = num_.divide_exact(den_)) {
    num_ = *q;
    den_ = BivariatePoly::constant(den_.algebra(), 1);
  }
}

BivariateRat BivariateRat::operator*(const BivariateRat& o) const {
  return BivariateRat(num_ * o.num_, den_ * o.den_);
}

BivariateRat BivariateRat::operator/(const BivariateRat& o) const {
  if (o.is_zero()) throw MathError(ErrorKind::InvalidInput, "division by zero function");
  return BivariateRat(num_ * o.den_, den_ * o.num_);
}

BivariateRat BivariateRat::operator+(const BivariateRat& o) const {
  if (den_ == o.den_) return BivariateRat(num_ + o.num_, den_);
  return BivariateRat(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

BivariateRat BivariateRat::operator-(const BivariateRat& o) const {
  return *this + BivariateRat(-o.num_, o.den_);
}

BivariateRat BivariateRat::operator*(const EtaleElement& c) const { return BivariateRat(num_ * c, den_); }

EtaleElement BivariateRat::evaluate(const Rat& p1, const Rat& p2) const {
  const EtaleElement d = den_.evaluate(p1, p2);
  if (!d.is_unit()) throw MathError(ErrorKind::ZeroDivisorOnRestriction, "denominator vanishes at the point");
  return num_.evaluate(p1, p2) * d.inverse();
}

BivariateRat BivariateRat::to_component(std::size_t c) const {
  return BivariateRat(num_.to_component(c), den_.to_component(c));
}

BivariateRat BivariateRat::conj(int i) const { return BivariateRat(num_.conj(i), den_.conj(i)); }

BivariateRat BivariateRat::map(const EtaleAlgebra& target,
                               const std::function<EtaleElement(const EtaleElement&)>& fn) const {
  return BivariateRat(num_.map(target, fn), den_.map(target, fn));
}

std::string BivariateRat::str() const { return "(" + num_.str() + ") / (" + den_.str() + ")"; }


// ---------------------------------------------------------------------------
// Univariate helpers over the residue constants

namespace {

void trim(UPoly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

UPoly umul(const UPoly& a, const UPoly& b) {
  if (a.empty() || b.empty()) return {};
  UPoly r(a.size() + b.size() - 1, a[0].algebra().zero());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  trim(r);
  return r;
}

UPoly uadd(const UPoly& a, const UPoly& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  UPoly r(std::max(a.size(), b.size()), a[0].algebra().zero());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  trim(r);
  return r;
}

UPoly umap(const UPoly& p, const std::function<EtaleElement(const EtaleElement&)>& fn) {
  UPoly r;
  for (const auto& c : p) r.push_back(fn(c));
  trim(r);
  return r;
}

bool uequal(UPoly a, UPoly b) {
  trim(a);
  trim(b);
  return a == b;
}

UPoly substitute(const BivariatePoly& f, const DivisorSpec& D) {
  const EtaleAlgebra& L = D.residue_constants();
  std::vector<UPoly> p1{{L.one()}}, p2{{L.one()}};
  UPoly out;
  for (const auto& [e, c] : f.terms()) {
    while (static_cast<int>(p1.size()) <= e.first) p1.push_back(umul(p1.back(), D.x1_image()));
    while (static_cast<int>(p2.size()) <= e.second) p2.push_back(umul(p2.back(), D.x2_image()));
    out = uadd(out, umul(umul(p1[e.first], p2[e.second]), {D.embed(c)}));
  }
  return out;
}

long strip(BivariatePoly& p, const BivariatePoly& d) {
  long v = 0;
  while (auto q = p.divide_exact(d)) {
    p = std::move(*q);
    ++v;
  }
  return v;
}

void require_same_field(const BivariateRat& f, const DivisorSpec& D) {
  if (f.algebra() != D.algebra()) {
    throw MathError(ErrorKind::AlgebraMismatch, "function and divisor over different constants");
  }
  if (f.is_zero()) throw MathError(ErrorKind::InvalidInput, "zero function");
}

ResidueClass restrict_unit(const BivariatePoly& num, const BivariatePoly& den, const DivisorSpec& D) {
  UPoly n = substitute(num, D), d = substitute(den, D);
  if (n.empty() || d.empty()) {
    throw MathError(ErrorKind::ZeroDivisorOnRestriction, "function restricts to zero on " + D.str());
  }
  return ResidueClass(D.residue_constants(), std::move(n), std::move(d));
}

// x with zero coordinates on monomials containing the first root, viewed without that root.
EtaleElement drop_first_generator(const EtaleElement& x, const EtaleAlgebra& target) {
  std::vector<Rat> c(target.dim());
  for (std::size_t m = 0; m < x.coords().size(); ++m) {
    if (m & 1u) {
      if (x.coords()[m] != 0) throw MathError(ErrorKind::AlgebraMismatch, "element involves the dropped root");
    } else {
      c[m >> 1] = x.coords()[m];
    }
  }
  return EtaleElement(target, std::move(c));
}

}  // namespace

// ---------------------------------------------------------------------------
// Divisors

DivisorSpec DivisorSpec::line(const EtaleElement& l0, const EtaleElement& l1, const EtaleElement& l2) {
  const EtaleAlgebra& K = l0.algebra();
  if (!K.is_field()) throw MathError(ErrorKind::InvalidInput, "divisors live over a field component");
  DivisorSpec D;
  D.poly_ = BivariatePoly::linear(l0, l1, l2);
  D.line_ = true;
  D.L_ = K;
  if (!l1.is_zero()) {
    const EtaleElement inv = l1.inverse();
    D.x1_ = {-(l0 * inv), -(l2 * inv)};
    D.x2_ = {K.zero(), K.one()};
  } else if (!l2.is_zero()) {
    D.x1_ = {K.zero(), K.one()};
    D.x2_ = {-(l0 * l2.inverse())};
  } else {
    throw MathError(ErrorKind::InvalidInput, "degenerate line");
  }
  trim(D.x1_);
  trim(D.x2_);
  return D;
}

DivisorSpec DivisorSpec::binary_quadratic(const EtaleElement& A, const EtaleElement& B, const EtaleElement& C) {
  const EtaleAlgebra& K = A.algebra();
  if (!K.is_field() || A.is_zero()) throw MathError(ErrorKind::InvalidInput, "binary quadratic needs A != 0 over a field");
  const EtaleElement disc = B * B - A * C * Rat(4);
  if (!disc.is_rational() || disc.is_zero()) {
    throw MathError(ErrorKind::InvalidInput, "discriminant must be a nonzero rational");
  }
  const SquareClass cls = squarefree_class(disc.coord(0));
  if (cls.is_trivial()) throw MathError(ErrorKind::InvalidInput, "binary quadratic is reducible");
  DivisorSpec D;
  D.L_ = K.adjoin(cls);
  if (!D.L_.is_field()) throw MathError(ErrorKind::InvalidInput, "binary quadratic is reducible over K");
  const BivariatePoly X1 = BivariatePoly::x1(K), X2 = BivariatePoly::x2(K);
  D.poly_ = X1 * X1 * A + X1 * X2 * B + X2 * X2 * C;
  D.line_ = false;
  const EtaleElement root = D.L_.root(D.L_.num_generators() - 1) * square_cofactor(disc.coord(0));
  const EtaleElement s = (root - D.embed(B)) * (D.embed(A) * Rat(2)).inverse();
  D.x1_ = {D.L_.zero(), s};
  D.x2_ = {D.L_.zero(), D.L_.one()};
  return D;
}

std::vector<DivisorSpec> DivisorSpec::conic_components(const EtaleAlgebra& K, const Rat& c) {
  SquareRootResult sq = is_square_with_witness(K.scalar(c));
  if (sq.is_square) {
    return {line(K.zero(), K.one(), -*sq.root), line(K.zero(), K.one(), *sq.root)};
  }
  return {binary_quadratic(K.one(), K.zero(), K.scalar(-c))};
}

EtaleElement DivisorSpec::embed(const EtaleElement& k) const { return extend_from_prefix(k, L_); }

std::string DivisorSpec::str() const { return "{" + poly_.str() + " = 0}"; }

// ---------------------------------------------------------------------------
// Residue classes

ResidueClass::ResidueClass(EtaleAlgebra L, UPoly num, UPoly den)
    : L_(std::move(L)), num_(std::move(num)), den_(std::move(den)) {
  trim(num_);
  trim(den_);
}

bool ResidueClass::is_trivial() const {
  UPoly P = umul(num_, den_);
  if (P.empty()) throw MathError(ErrorKind::ZeroDivisorOnRestriction, "zero residue");
  const std::size_t deg = P.size() - 1;
  if (deg % 2) return false;
  const EtaleElement lc = P.back();
  const EtaleElement inv = lc.inverse();
  for (auto& c : P) c = c * inv;
  // Monic square root determined by the top half of the coefficients.
  const std::size_t k = deg / 2;
  UPoly S(k + 1, L_.zero());
  S[k] = L_.one();
  for (std::size_t j = 1; j <= k; ++j) {
    EtaleElement acc = P[2 * k - j];
    for (std::size_t i = k - j + 1; i <= k; ++i) {
      const std::size_t l = 2 * k - j - i;
      if (l >= k - j + 1 && l <= k) acc = acc - S[i] * S[l];
    }
    S[k - j] = acc * Rat(1, 2);
  }
  if (!uequal(umul(S, S), P)) return false;
  return is_square_with_witness(lc).is_square;
}

ResidueClass ResidueClass::operator*(const ResidueClass& o) const {
  if (L_ != o.L_) throw MathError(ErrorKind::AlgebraMismatch, "residue classes over different fields");
  return ResidueClass(L_, umul(num_, o.num_), umul(den_, o.den_));
}

std::string ResidueClass::str() const {
  auto show = [](const UPoly& p) {
    std::ostringstream os;
    for (std::size_t i = p.size(); i-- > 0;) {
      if (p[i].is_zero()) continue;
      os << (i + 1 == p.size() ? "" : " + ") << "(" << p[i].str() << ")";
      if (i) os << "*T^" << i;
    }
    return os.str();
  };
  return "[" + show(num_) + "] / [" + show(den_) + "] over " + L_.describe();
}

long valuation_along(const BivariateRat& f, const DivisorSpec& D) {
  require_same_field(f, D);
  BivariatePoly n = f.num(), d = f.den();
  return strip(n, D.poly()) - strip(d, D.poly());
}

ResidueClass restrict_to(const BivariateRat& f, const DivisorSpec& D) {
  require_same_field(f, D);
  BivariatePoly n = f.num(), d = f.den();
  if (strip(n, D.poly()) != strip(d, D.poly())) {
    throw MathError(ErrorKind::InvalidInput, "function has a zero or pole along " + D.str());
  }
  return restrict_unit(n, d, D);
}

ResidueClass residue_symbol(const BivariateRat& f, const BivariateRat& g, const DivisorSpec& D) {
  require_same_field(f, D);
  require_same_field(g, D);
  BivariatePoly fn = f.num(), fd = f.den(), gn = g.num(), gd = g.den();
  const long m = strip(fn, D.poly()) - strip(fd, D.poly());
  const long n = strip(gn, D.poly()) - strip(gd, D.poly());
  const EtaleAlgebra& L = D.residue_constants();
  ResidueClass r(L, {L.scalar((m * n) % 2 ? -1 : 1)}, {L.one()});
  // f^n g^{-m} and f^{n mod 2} g^{m mod 2} agree modulo squares.
  if (n % 2) r = r * restrict_unit(fn, fd, D);
  if (m % 2) r = r * restrict_unit(gn, gd, D);
  return r;
}

ResidueClass residue_of_sum(const std::vector<SymbolTerm>& B, const DivisorSpec& D) {
  const EtaleAlgebra& L = D.residue_constants();
  ResidueClass r(L, {L.one()}, {L.one()});
  for (const auto& [f, g] : B) r = r * residue_symbol(f, g, D);
  return r;
}

ResidueClass corestricted_residue(const std::vector<SymbolTerm>& B, const DivisorSpec& D) {
  if (D.algebra().num_generators() != 0) throw MathError(ErrorKind::InvalidInput, "divisor must be over Q");
  if (B.empty()) return ResidueClass(D.residue_constants(), {D.residue_constants().one()}, {D.residue_constants().one()});
  const EtaleAlgebra Fa = B.front().first.algebra();
  const EtaleAlgebra& L0 = D.residue_constants();
  ResidueClass total(L0, {L0.one()}, {L0.one()});
  for (std::size_t c = 0; c < Fa.num_components(); ++c) {
    const EtaleAlgebra K = Fa.component_field(c);
    std::vector<SymbolTerm> Bc;
    for (const auto& [f, g] : B) Bc.emplace_back(f.to_component(c), g.to_component(c));
    if (K.num_generators() == 0) {
      total = total * residue_of_sum(Bc, D);
      continue;
    }
    auto ext = [&](int i, int j) { return K.scalar(D.poly().coefficient(i, j).coord(0)); };
    // N_{kappa(D_K)/kappa(D)}: multiply by the sqrt(a)-conjugate, then drop that root.
    auto norm_down = [&](const ResidueClass& r) {
      auto n = [&](const UPoly& p) {
        UPoly q = umul(p, umap(p, [](const EtaleElement& x) { return x.conj(0); }));
        return umap(q, [&](const EtaleElement& x) { return drop_first_generator(x, L0); });
      };
      return ResidueClass(L0, n(r.num()), n(r.den()));
    };
    if (D.is_line()) {
      const DivisorSpec DK = DivisorSpec::line(ext(0, 0), ext(1, 0), ext(0, 1));
      total = total * norm_down(residue_of_sum(Bc, DK));
      continue;
    }
    const EtaleElement A = ext(2, 0), Bq = ext(1, 1), C = ext(0, 2);
    const Rat disc = (Bq * Bq - A * C * Rat(4)).coord(0);
    if (squarefree_class(disc) == K.generator(0)) {
      // D splits into a divisor and its conjugate; kappa(D) is kappa of either factor.
      const EtaleElement root = K.root(0) * square_cofactor(disc);
      const EtaleElement s = (root - Bq) * (A * Rat(2)).inverse();
      const DivisorSpec Dp = DivisorSpec::line(K.zero(), K.one(), -s);
      std::vector<SymbolTerm> conjB;
      for (const auto& [f, g] : Bc) conjB.emplace_back(f.conj(0), g.conj(0));
      if (Fa.num_components() != 1) throw MathError(ErrorKind::InvalidInput, "split divisor over split F_a");
      return residue_of_sum(Bc, Dp) * residue_of_sum(conjB, Dp);
    }
    const DivisorSpec DK = DivisorSpec::binary_quadratic(A, Bq, C);
    total = total * norm_down(residue_of_sum(Bc, DK));
  }
  return total;
}

// ---------------------------------------------------------------------------
// Specialization

namespace {

// Lowest power of x1, and the x2-polynomial multiplying it.
std::pair<int, std::map<int, EtaleElement>> lowest_in_x1(const BivariatePoly& p) {
  const int v = p.terms().begin()->first.first;
  std::map<int, EtaleElement> out;
  for (const auto& [e, c] : p.terms()) {
    if (e.first == v) out.emplace(e.second, c);
  }
  return {v, out};
}

EtaleElement specialize_over_field(const BivariateRat& f, const ParamSystem& ps) {
  if (f.is_zero()) throw MathError(ErrorKind::InvalidInput, "cannot specialize the zero function");
  BivariatePoly num = f.num().shift(ps.p1, ps.p2), den = f.den().shift(ps.p1, ps.p2);
  if (ps.swapped) {
    num = num.swap_variables();
    den = den.swap_variables();
  }
  // s_{pi_1}: f = pi_1^v f1 gives (-1)^v f1|_{pi_1 = 0}; then the same in pi_2 and evaluate.
  const auto [vn, un] = lowest_in_x1(num);
  const auto [vd, ud] = lowest_in_x1(den);
  const long v1 = vn - vd;
  const long w = un.begin()->first - ud.begin()->first;
  EtaleElement value = un.begin()->second * ud.begin()->second.inverse();
  if ((v1 + w) % 2) value = -value;
  return value;
}

}  // namespace

EtaleElement specialize_class1(const BivariateRat& f, const ParamSystem& ps) {
  const EtaleAlgebra& K = f.algebra();
  if (K.is_field()) return specialize_over_field(f, ps);
  std::vector<EtaleElement> parts;
  for (std::size_t c = 0; c < K.num_components(); ++c) parts.push_back(specialize_over_field(f.to_component(c), ps));
  return from_components(K, parts);
}

BrauerClass2 specialize_class2(const BivariateRat& f, const BivariateRat& g, const ParamSystem& ps) {
  return symbol(specialize_class1(f, ps), specialize_class1(g, ps));
}

}  // namespace massey4
