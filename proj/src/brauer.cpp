#include "massey4/brauer.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "massey4/conics.hpp"

namespace massey4 {

namespace {

void require_same(const BrauerClass2& a, const BrauerClass2& b) {
  if (a.algebra() != b.algebra()) {
    throw MathError(ErrorKind::AlgebraMismatch,
                    "Brauer classes over " + a.algebra().describe() + " and " + b.algebra().describe());
  }
}

int prefix_length(const EtaleAlgebra& small, const EtaleAlgebra& big) {
  const auto& g = small.generators();
  if (g.size() > big.generators().size() ||
      !std::equal(g.begin(), g.end(), big.generators().begin())) {
    throw MathError(ErrorKind::AlgebraMismatch,
                    small.describe() + " is not a prefix subalgebra of " + big.describe());
  }
  return static_cast<int>(g.size());
}

LocalPlace rational_place(const Int& p) {
  LocalPlace place;
  place.prime = p;
  return place;
}

}  // namespace

void BrauerClass2::flip(const LocalPlace& place) {
  auto it = places_.find(place);
  if (it != places_.end()) {
    places_.erase(it);
  } else {
    places_.insert(place);
  }
}

std::vector<Int> BrauerClass2::primes() const {
  std::vector<Int> out;
  for (const auto& pl : places_) {
    if (out.empty() || out.back() != pl.prime) out.push_back(pl.prime);
  }
  return out;
}

bool BrauerClass2::satisfies_reciprocity() const {
  std::vector<int> count(algebra_.num_components(), 0);
  for (const auto& pl : places_) count[pl.component] ^= 1;
  return std::all_of(count.begin(), count.end(), [](int c) { return c == 0; });
}

BrauerClass2 BrauerClass2::operator+(const BrauerClass2& other) const {
  require_same(*this, other);
  BrauerClass2 out = *this;
  for (const auto& pl : other.places_) out.flip(pl);
  return out;
}

bool operator==(const BrauerClass2& a, const BrauerClass2& b) {
  require_same(a, b);
  return a.places_ == b.places_;
}

std::string BrauerClass2::str() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& pl : places_) {
    if (!first) os << ", ";
    first = false;
    os << pl.str();
  }
  os << "}";
  return os.str();
}

BrauerClass2 symbol(const EtaleElement& pi, const EtaleElement& rho) {
  const EtaleAlgebra& E = pi.algebra();
  if (rho.algebra() != E) throw MathError(ErrorKind::AlgebraMismatch, "symbol entries differ");
  BrauerClass2 out(E);
  for (const Int& p : symbol_support(pi, rho)) {
    for (const auto& place : places_above(E, p)) {
      if (local_symbol(E, place, pi, rho) < 0) out.flip(place);
    }
  }
  return out;
}

BrauerClass2 symbol(const Rat& a, const Rat& b) {
  if (a == 0 || b == 0) throw MathError(ErrorKind::NotAUnit, "symbol of 0");
  std::vector<Int> primes = prime_support(a);
  for (const Int& p : prime_support(b)) primes.push_back(p);
  primes.push_back(2);
  primes.push_back(0);
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  BrauerClass2 out;
  for (const Int& p : primes) {
    if (hilbert_symbol_qp(a, b, p) < 0) out.flip(rational_place(p));
  }
  return out;
}

LocalPlace resolve_place(const EtaleAlgebra& E, const LocalPlace& key) {
  for (auto& place : places_above(E, key.prime)) {
    if (place == key) return place;
  }
  throw MathError(ErrorKind::AlgebraMismatch, "no place " + key.str() + " on " + E.describe());
}

BrauerClass2 restriction(const BrauerClass2& B, const EtaleAlgebra& E) {
  const int k = prefix_length(B.algebra(), E);
  BrauerClass2 out(E);
  for (const Int& p : B.primes()) {
    for (const auto& w : places_above(E, p)) {
      LocalPlace v = w.truncate(k);
      if (B.invariant(v) && w.pivots.size() == v.pivots.size()) out.flip(w);
    }
  }
  return out;
}

BrauerClass2 corestriction(const BrauerClass2& B, int k) {
  const EtaleAlgebra small = B.algebra().prefix(k);
  BrauerClass2 out(small);
  std::map<Int, std::vector<LocalPlace>> cache;
  for (const auto& w : B.support()) {
    LocalPlace key = w.truncate(k);
    auto& places = cache[w.prime];
    if (places.empty()) places = places_above(small, w.prime);
    out.flip(*std::find(places.begin(), places.end(), key));
  }
  return out;
}

BrauerClass2 corestrict_symbol_to_quadratic(const EtaleElement& pi, const EtaleElement& rho,
                                            unsigned mask) {
  const EtaleAlgebra& E = pi.algebra();
  if (E.num_generators() != 2 || mask == 0 || mask > 3) {
    throw MathError(ErrorKind::AlgebraMismatch, "expected F_{a,d} and a mask in {1,2,3}");
  }
  if (mask == 1) return corestriction(symbol(pi, rho), 1);
  const SquareClass& a = E.generator(0);
  const SquareClass& d = E.generator(1);
  const SquareClass t = mask == 2 ? d : a * d;
  EtaleAlgebra target({t, a});
  std::vector<AlgebraMap::Image> images{{Rat(1), 2u}, {Rat(1), 1u}};
  if (mask == 3) {
    Rat ratio(d.rep(), t.rep() * a.rep());
    ratio.canonicalize();
    images[1] = {*rational_sqrt(ratio), 3u};
  }
  AlgebraMap phi(E, target, images);
  return corestriction(symbol(phi(pi), phi(rho)), 1);
}

// ---------------------------------------------------------------------------

namespace {

// Gaussian elimination over F2; free variables are set to zero.
std::optional<std::vector<int>> solve_f2(std::vector<std::vector<int>> rows, std::vector<int> rhs,
                                         std::size_t ncols) {
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
    std::size_t sel = r;
    while (sel < rows.size() && !rows[sel][c]) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[sel], rows[r]);
    std::swap(rhs[sel], rhs[r]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i != r && rows[i][c]) {
        for (std::size_t j = 0; j < ncols; ++j) rows[i][j] ^= rows[r][j];
        rhs[i] ^= rhs[r];
      }
    }
    pivot_col.push_back(static_cast<int>(c));
    ++r;
  }
  for (std::size_t i = r; i < rows.size(); ++i) {
    if (rhs[i]) return std::nullopt;
  }
  std::vector<int> x(ncols, 0);
  for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = rhs[i];
  return x;
}

bool useful_prime(const Int& q, const std::vector<SymbolCondition>& conditions) {
  for (const auto& c : conditions) {
    if (hilbert_symbol_qp(c.t, Rat(q), q) < 0) return false;
  }
  return true;
}

}  // namespace

Int solve_symbol_conditions(const std::vector<SymbolCondition>& conditions,
                            const std::vector<Int>& extra_primes) {
  std::vector<Int> places{0, 2};
  for (const auto& c : conditions) {
    if (c.target.algebra().num_generators() != 0) {
      throw MathError(ErrorKind::AlgebraMismatch, "symbol conditions live over Q");
    }
    for (const Int& p : prime_support(c.t)) places.push_back(p);
    for (const Int& p : c.target.primes()) places.push_back(p);
  }
  for (const Int& p : extra_primes) places.push_back(p);
  std::sort(places.begin(), places.end());
  places.erase(std::unique(places.begin(), places.end()), places.end());

  std::vector<Int> gens{-1};
  for (const Int& p : places) {
    if (p != 0) gens.push_back(p);
  }
  Int next = places.back() < 2 ? Int(2) : places.back();
  for (int round = 0;; ++round) {
    std::vector<std::vector<int>> rows;
    std::vector<int> rhs;
    for (const auto& c : conditions) {
      for (const Int& v : places) {
        std::vector<int> row;
        for (const Int& g : gens) row.push_back(hilbert_symbol_qp(c.t, Rat(g), v) < 0 ? 1 : 0);
        rows.push_back(std::move(row));
        rhs.push_back(c.target.invariant(rational_place(v)));
      }
    }
    if (auto x = solve_f2(rows, rhs, gens.size())) {
      Int n = 1;
      for (std::size_t i = 0; i < gens.size(); ++i) {
        if ((*x)[i]) n *= gens[i];
      }
      return n;
    }
    if (round >= config().support_enlargements) break;
    // A prime at which every t is a square adds a column without adding conditions.
    do {
      next = next_prime(next);
    } while (!useful_prime(next, conditions));
    gens.push_back(next);
  }
  throw MathError(ErrorKind::NoSolutionInSupport,
                  "symbol conditions insoluble after " +
                      std::to_string(config().support_enlargements) + " support enlargements");
}

Int express_as_symbol(const BrauerClass2& A, const SquareClass& a) {
  if (A.algebra().num_generators() != 0) {
    throw MathError(ErrorKind::AlgebraMismatch, "express_as_symbol expects a class over Q");
  }
  if (!restriction(A, quadratic_algebra(a)).is_zero()) {
    throw MathError(ErrorKind::NotSplitByFa, "class " + A.str() + " survives over F_" + a.str());
  }
  if (A.is_zero()) return 1;
  const Int u = solve_symbol_conditions({{Rat(a.rep()), A}});
  if (symbol(Rat(a.rep()), Rat(u)) != A) {
    throw MathError(ErrorKind::VerificationFailed, "express_as_symbol produced a wrong u");
  }
  return u;
}

ChainDecomposition chain_decompose(const SquareClass& a, const SquareClass& u, const SquareClass& b,
                                   const SquareClass& v) {
  const Rat ra(a.rep()), ru(u.rep()), rb(b.rep()), rv(v.rep());
  const BrauerClass2 A = symbol(ra, ru);
  const BrauerClass2 B = symbol(rb, rv);
  if (A != B) throw MathError(ErrorKind::PreconditionFailed, "(a,u) != (b,v)");

  const Rat rab((a * b).rep());
  auto works = [&](const Int& n) {
    return symbol(ra, ru * Rat(n)).is_zero() && symbol(rb, rv * Rat(n)).is_zero() &&
           symbol(rab, Rat(n)).is_zero();
  };
  std::optional<Int> n_ab;
  for (const Int& cand : {Int(1), u.rep(), v.rep(), (u * v).rep()}) {
    if (works(cand)) {
      n_ab = cand;
      break;
    }
  }
  if (!n_ab) n_ab = solve_symbol_conditions({{ra, A}, {rb, B}});

  ChainDecomposition out;
  out.n_ab = squarefree_class(Rat(*n_ab)).rep();
  out.n_a = (u * SquareClass::from_squarefree(out.n_ab)).rep();
  out.n_b = (v * SquareClass::from_squarefree(out.n_ab)).rep();
  out.xi_a = solve_rational_norm(a, Rat(out.n_a));
  out.xi_b = solve_rational_norm(b, Rat(out.n_b));
  out.xi_ab = solve_rational_norm(a * b, Rat(out.n_ab));
  return out;
}

std::optional<BrauerClass2> ground_preimage(const BrauerClass2& B) {
  const EtaleAlgebra& E = B.algebra();
  BrauerClass2 A;
  for (const auto& w : B.support()) {
    if (w.local_degree() % 2 == 0) return std::nullopt;
  }
  for (const Int& p : B.primes()) {
    int value = -1;
    for (const auto& w : places_above(E, p)) {
      if (w.local_degree() != 1) continue;
      const int inv = B.invariant(w);
      if (value >= 0 && inv != value) return std::nullopt;
      value = inv;
    }
    if (value == 1) A.flip(rational_place(p));
  }
  if (A.support().size() % 2) {
    // Fix the parity at a place of Q with no degree-one place above it.
    std::optional<Int> free_place;
    for (Int q = 0; !free_place; q = q == 0 ? Int(2) : next_prime(q)) {
      if (q > 1000) break;
      if (A.invariant(rational_place(q))) continue;
      bool all_even = true;
      for (const auto& w : places_above(E, q)) all_even = all_even && w.local_degree() > 1;
      if (all_even) free_place = q;
    }
    if (!free_place) return std::nullopt;
    A.flip(rational_place(*free_place));
  }
  if (restriction(A, E) != B) return std::nullopt;
  return A;
}

bool in_image_of_ground(const BrauerClass2& B) {
  if (B.algebra().num_generators() != 2) {
    throw MathError(ErrorKind::AlgebraMismatch, "in_image_of_ground expects F_{a,d}");
  }
  return ground_preimage(B).has_value();
}

}  // namespace massey4
