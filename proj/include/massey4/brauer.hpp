#pragma once

// 2-torsion Brauer classes of multiquadratic etale algebras, stored as local invariants.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "massey4/etale.hpp"
#include "massey4/localfields.hpp"

namespace massey4 {

class BrauerClass2 {
 public:
  BrauerClass2() = default;  // zero class over Q
  explicit BrauerClass2(EtaleAlgebra algebra) : algebra_(std::move(algebra)) {}

  const EtaleAlgebra& algebra() const { return algebra_; }
  /// Places with invariant 1/2.
  const std::set<LocalPlace>& support() const { return places_; }
  bool is_zero() const { return places_.empty(); }
  int invariant(const LocalPlace& place) const { return places_.count(place) ? 1 : 0; }
  void flip(const LocalPlace& place);
  /// Rational primes below the nontrivial places (0 for infinity).
  std::vector<Int> primes() const;
  /// Even number of nontrivial invariants in each field component.
  bool satisfies_reciprocity() const;

  BrauerClass2 operator+(const BrauerClass2& other) const;
  BrauerClass2& operator+=(const BrauerClass2& other) { return *this = *this + other; }
  friend bool operator==(const BrauerClass2& a, const BrauerClass2& b);
  friend bool operator!=(const BrauerClass2& a, const BrauerClass2& b) { return !(a == b); }

  std::string str() const;

 private:
  EtaleAlgebra algebra_;
  std::set<LocalPlace> places_;
};

/// Quaternion class (pi, rho) over E.
BrauerClass2 symbol(const EtaleElement& pi, const EtaleElement& rho);
/// Quaternion class (a, b) over Q.
BrauerClass2 symbol(const Rat& a, const Rat& b);

/// Base change from a prefix subalgebra of E to E.
BrauerClass2 restriction(const BrauerClass2& B, const EtaleAlgebra& E);
/// Corestriction from E down to E.prefix(k).
BrauerClass2 corestriction(const BrauerClass2& B, int k = 0);

/// Corestriction of (pi, rho) from F_{a,d} to its quadratic subalgebra F_t, where
/// t is a, d or ad according to the monomial mask 1, 2 or 3.
BrauerClass2 corestrict_symbol_to_quadratic(const EtaleElement& pi, const EtaleElement& rho,
                                            unsigned mask);

/// Place of E equal (as a key) to the given one, with all fields filled in.
LocalPlace resolve_place(const EtaleAlgebra& E, const LocalPlace& key);

// ---------------------------------------------------------------------------
// Linear algebra over F2 on rational S-units.

/// One requirement (t, n)_v = inv_v(target) at every place v, for the unknown n.
struct SymbolCondition {
  Rat t;
  BrauerClass2 target;  // over Q
};

/// Squarefree n satisfying every condition. Extra primes (at which every t is a
/// square) are adjoined up to config().support_enlargements times; then throws
/// NoSolutionInSupport.
Int solve_symbol_conditions(const std::vector<SymbolCondition>& conditions,
                            const std::vector<Int>& extra_primes = {});

/// u with A = (a, u) over Q. Throws NotSplitByFa if A does not vanish over F_a.
Int express_as_symbol(const BrauerClass2& A, const SquareClass& a);

struct ChainDecomposition {
  Int n_a, n_b, n_ab;
  EtaleElement xi_a, xi_b, xi_ab;  // N(xi_a) = n_a etc., exactly
};

/// Given (a, u) = (b, v) over Q, finds u = n_a n_ab, v = n_b n_ab modulo squares
/// with every n_t a norm from F_t.
ChainDecomposition chain_decompose(const SquareClass& a, const SquareClass& u, const SquareClass& b,
                                   const SquareClass& v);

/// B over F_{a,d} comes from Br(Q)[2]: decided from the local invariants.
bool in_image_of_ground(const BrauerClass2& B);
/// A class over Q whose restriction is B, when one exists.
std::optional<BrauerClass2> ground_preimage(const BrauerClass2& B);

}  // namespace massey4
