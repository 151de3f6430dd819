#pragma once

// Local square classes, places of multiquadratic algebras and local quaternion symbols.
//
// The prime 0 stands for the infinite place throughout.

#include <string>
#include <vector>

#include "massey4/arith.hpp"
#include "massey4/etale.hpp"

namespace massey4 {

/// Class of q in Q_p^x / Q_p^x2 (or R^x / R^x2 when p == 0).
struct LocalSquareClass {
  Int prime;
  int valuation_parity = 0;  // v_p(q) mod 2; unused at infinity
  /// odd p: 0 if the unit part is a residue, else 1; p = 2: unit part mod 8; infinity: 0/1 for +/-.
  int unit = 0;

  bool is_trivial() const;
  /// F2 coordinates (1, 2 or 3 bits).
  std::vector<int> bits() const;
  /// Representative from {1, u, p, up}, {+-1, +-2, +-5, +-10} or {1, -1}.
  Int representative() const;
  std::string str() const { return representative().get_str(); }
  friend bool operator==(const LocalSquareClass& a, const LocalSquareClass& b) {
    return a.bits() == b.bits();
  }
};

LocalSquareClass local_square_class(const Rat& q, const Int& p);

/// A place of an etale algebra E above a rational prime.
///
/// The completion at p is the tower Q_p(sqrt t_i : i in pivots); every other
/// generator is mapped to sign * (local square root) * (product of pivot roots).
struct LocalPlace {
  Int prime;
  std::vector<int> pivots;      // generator indices forming the local tower
  std::vector<int> dependents;  // the remaining generator indices
  std::vector<int> signs;       // +/-1 per dependent
  std::size_t component = 0;    // field component of E containing the place
  std::vector<LocalSquareClass> descriptor;  // local classes of all generators

  bool is_infinite() const { return prime == 0; }
  int local_degree() const { return 1 << pivots.size(); }
  bool is_complex() const { return is_infinite() && !pivots.empty(); }
  std::string str() const;

  /// Place of E.prefix(k) lying below this one.
  LocalPlace truncate(int k) const;

  friend bool operator<(const LocalPlace& a, const LocalPlace& b);
  friend bool operator==(const LocalPlace& a, const LocalPlace& b);
};

std::vector<LocalPlace> places_above(const EtaleAlgebra& E, const Int& p);

/// Classical Hilbert symbol (a, b)_p in {+1, -1}; closed formulas.
int hilbert_symbol_qp(const Rat& a, const Rat& b, const Int& p);

/// Same symbol decided by searching for a norm x^2 - a y^2 in every square class
/// of Q_p^x; used as an independent cross-check of the closed formulas.
int hilbert_symbol_qp_by_norms(const Rat& a, const Rat& b, const Int& p);

/// Hilbert symbol (pi, rho) over the completion of E at the given place.
/// Throws PrecisionExhausted when the p-adic evaluation stays inconclusive at the cap.
int local_symbol(const EtaleAlgebra& E, const LocalPlace& place, const EtaleElement& pi,
                 const EtaleElement& rho);

/// Rational primes outside which the symbol (pi, rho) over E is unramified, plus 2 and 0 (infinity).
std::vector<Int> symbol_support(const EtaleElement& pi, const EtaleElement& rho);

}  // namespace massey4
