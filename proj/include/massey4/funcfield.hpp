#pragma once

// Rational functions in x1, x2 over Q or a quadratic etale algebra, residues of
// quaternion symbols along prime divisors, and iterated specialization at points.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "massey4/brauer.hpp"
#include "massey4/etale.hpp"

namespace massey4 {

class BivariatePoly {
 public:
  using Exponent = std::pair<int, int>;  // (deg x1, deg x2)

  BivariatePoly() = default;
  explicit BivariatePoly(EtaleAlgebra algebra) : algebra_(std::move(algebra)) {}

  static BivariatePoly constant(const EtaleElement& c);
  static BivariatePoly constant(const EtaleAlgebra& K, const Rat& c) { return constant(K.scalar(c)); }
  static BivariatePoly x1(const EtaleAlgebra& K);
  static BivariatePoly x2(const EtaleAlgebra& K);
  /// l0 + l1 x1 + l2 x2
  static BivariatePoly linear(const EtaleElement& l0, const EtaleElement& l1, const EtaleElement& l2);

  const EtaleAlgebra& algebra() const { return algebra_; }
  const std::map<Exponent, EtaleElement>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;
  /// Coefficient of x1^i x2^j (zero if absent).
  EtaleElement coefficient(int i, int j) const;

  BivariatePoly operator+(const BivariatePoly& o) const;
  BivariatePoly operator-(const BivariatePoly& o) const;
  BivariatePoly operator-() const;
  BivariatePoly operator*(const BivariatePoly& o) const;
  BivariatePoly operator*(const EtaleElement& c) const;
  BivariatePoly pow(unsigned e) const;

  EtaleElement evaluate(const Rat& p1, const Rat& p2) const;
  /// f(x1 + p1, x2 + p2)
  BivariatePoly shift(const Rat& p1, const Rat& p2) const;
  /// f(x2, x1)
  BivariatePoly swap_variables() const;
  /// Applies a coefficient map (component projection, conjugation, embedding).
  BivariatePoly map(const EtaleAlgebra& target, const std::function<EtaleElement(const EtaleElement&)>& fn) const;
  BivariatePoly to_component(std::size_t c) const;
  BivariatePoly conj(int i) const;

  /// Quotient if d divides this exactly over a field, otherwise nullopt.
  std::optional<BivariatePoly> divide_exact(const BivariatePoly& d) const;

  std::string str() const;
  friend bool operator==(const BivariatePoly& a, const BivariatePoly& b);

 private:
  void add_term(const Exponent& e, const EtaleElement& c);
  EtaleAlgebra algebra_;
  std::map<Exponent, EtaleElement> terms_;
};

class BivariateRat {
 public:
  BivariateRat() = default;
  BivariateRat(BivariatePoly num);
  BivariateRat(BivariatePoly num, BivariatePoly den);

  const BivariatePoly& num() const { return num_; }
  const BivariatePoly& den() const { return den_; }
  const EtaleAlgebra& algebra() const { return num_.algebra(); }
  bool is_zero() const { return num_.is_zero(); }

  BivariateRat operator*(const BivariateRat& o) const;
  BivariateRat operator/(const BivariateRat& o) const;
  BivariateRat operator+(const BivariateRat& o) const;
  BivariateRat operator-(const BivariateRat& o) const;
  BivariateRat operator*(const EtaleElement& c) const;

  /// Value at (p1, p2); throws ZeroDivisorOnRestriction when the denominator vanishes there.
  EtaleElement evaluate(const Rat& p1, const Rat& p2) const;
  BivariateRat to_component(std::size_t c) const;
  BivariateRat conj(int i) const;
  BivariateRat map(const EtaleAlgebra& target, const std::function<EtaleElement(const EtaleElement&)>& fn) const;

  std::string str() const;

 private:
  void normalize();
  BivariatePoly num_, den_;
};

/// Point P with parameters (x1 - P1, x2 - P2), taken in the opposite order if swapped.
struct ParamSystem {
  Rat p1, p2;
  bool swapped = false;
};

/// Univariate polynomial in T, coefficients in the residue algebra; index = degree.
using UPoly = std::vector<EtaleElement>;

/// Prime divisor of the plane over a field K: a line l0 + l1 x1 + l2 x2, or a
/// binary quadratic form A x1^2 + B x1 x2 + C x2^2 with rational discriminant
/// that is not a square in K.
class DivisorSpec {
 public:
  static DivisorSpec line(const EtaleElement& l0, const EtaleElement& l1, const EtaleElement& l2);
  static DivisorSpec binary_quadratic(const EtaleElement& A, const EtaleElement& B, const EtaleElement& C);
  /// Irreducible components over K of x1^2 - c x2^2 = 0 (one quadric, or two lines when c is a square in K).
  static std::vector<DivisorSpec> conic_components(const EtaleAlgebra& K, const Rat& c);

  const BivariatePoly& poly() const { return poly_; }
  const EtaleAlgebra& algebra() const { return poly_.algebra(); }
  bool is_line() const { return line_; }

  /// Function field of D as L(T): the constant field L and the images of x1, x2.
  const EtaleAlgebra& residue_constants() const { return L_; }
  const UPoly& x1_image() const { return x1_; }
  const UPoly& x2_image() const { return x2_; }
  /// Embedding K -> L.
  EtaleElement embed(const EtaleElement& k) const;
  std::string str() const;

 private:
  BivariatePoly poly_;
  bool line_ = true;
  EtaleAlgebra L_;
  UPoly x1_, x2_;
};

/// Element of kappa(D)^x / squares, kappa(D) = L(T).
class ResidueClass {
 public:
  ResidueClass() = default;
  ResidueClass(EtaleAlgebra L, UPoly num, UPoly den);

  const EtaleAlgebra& constants() const { return L_; }
  const UPoly& num() const { return num_; }
  const UPoly& den() const { return den_; }

  /// Trivial iff num * den is a square in L[T] (L a field).
  bool is_trivial() const;
  ResidueClass operator*(const ResidueClass& o) const;
  friend bool operator==(const ResidueClass& a, const ResidueClass& b) { return (a * b).is_trivial(); }
  std::string str() const;

 private:
  EtaleAlgebra L_;
  UPoly num_, den_;
};

/// Order of vanishing along D; f must live over D's field.
long valuation_along(const BivariateRat& f, const DivisorSpec& D);
/// Class of a function with zero valuation along D, restricted to D.
ResidueClass restrict_to(const BivariateRat& f, const DivisorSpec& D);
/// Tame symbol of (f, g) at D: (-1)^{mn} f^n / g^m restricted to D, m = v_D(f), n = v_D(g).
ResidueClass residue_symbol(const BivariateRat& f, const BivariateRat& g, const DivisorSpec& D);

/// One symbol (f, g) in a formal sum of quaternion classes over K(x1, x2).
using SymbolTerm = std::pair<BivariateRat, BivariateRat>;
ResidueClass residue_of_sum(const std::vector<SymbolTerm>& B, const DivisorSpec& D);

/// Residue at a divisor D over Q of the corestriction N_{K_a/K}(B) of a class over
/// K_a = F_a(x1, x2), computed from the divisors of K_a above D. Trivial iff
/// N(B) is unramified at D.
ResidueClass corestricted_residue(const std::vector<SymbolTerm>& B, const DivisorSpec& D);

/// s_{P,pi}(f): a unit of the coefficient algebra representing the specialized class.
EtaleElement specialize_class1(const BivariateRat& f, const ParamSystem& ps);
/// s_{P,pi}(f, g) = (s(f), s(g)).
BrauerClass2 specialize_class2(const BivariateRat& f, const BivariateRat& g, const ParamSystem& ps);

}  // namespace massey4
