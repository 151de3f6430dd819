#pragma once

// Multiquadratic etale algebras Q[x_1..x_n]/(x_i^2 - t_i) and their elements.
//
// Elements always use the 2^n monomial coordinates; coordinate index M is the
// bitmask of the roots in the monomial x_M = prod_{i in M} x_i.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "massey4/arith.hpp"

namespace massey4 {

class EtaleElement;

/// Field component of an etale algebra, described through the pivot generators.
struct EtaleComponent {
  std::vector<int> pivots;               // generator indices that stay independent
  std::vector<int> dependents;           // remaining generator indices
  std::vector<int> signs;                // +/-1 per dependent: x_j = sign * scale * x_mask
  std::vector<unsigned> dependent_masks; // mask over *pivot positions* for each dependent
  std::vector<Rat> dependent_scales;
};

class EtaleAlgebra {
 public:
  static constexpr int kMaxGenerators = 3;

  EtaleAlgebra();  // the rationals
  explicit EtaleAlgebra(std::vector<SquareClass> generators);

  static EtaleAlgebra rationals() { return EtaleAlgebra(); }

  int num_generators() const;
  std::size_t dim() const { return std::size_t{1} << num_generators(); }
  const std::vector<SquareClass>& generators() const;
  const SquareClass& generator(int i) const;

  /// Algebra generated by the first k generators.
  EtaleAlgebra prefix(int k) const;
  EtaleAlgebra adjoin(const SquareClass& t) const;

  /// x_I * x_J = structure_coefficient(I, J) * x_{I xor J}
  const Int& structure_coefficient(unsigned i, unsigned j) const;

  std::size_t num_components() const;
  const EtaleComponent& component(std::size_t c) const;
  /// The field K_c as an algebra over its pivot generators.
  EtaleAlgebra component_field(std::size_t c) const;
  bool is_field() const { return num_components() == 1; }

  EtaleElement one() const;
  EtaleElement zero() const;
  EtaleElement scalar(const Rat& q) const;
  /// The root x_i.
  EtaleElement root(int i) const;
  EtaleElement monomial(unsigned mask, const Rat& coefficient = 1) const;
  EtaleElement from_coords(std::vector<Rat> coords) const;

  /// Human-readable description such as "Q(sqrt2) x Q(sqrt2)".
  std::string describe() const;

  friend bool operator==(const EtaleAlgebra& a, const EtaleAlgebra& b);
  friend bool operator!=(const EtaleAlgebra& a, const EtaleAlgebra& b) { return !(a == b); }

 private:
  friend class EtaleElement;
  struct Data;
  std::shared_ptr<const Data> data_;
};

class EtaleElement {
 public:
  EtaleElement() = default;
  EtaleElement(EtaleAlgebra algebra, std::vector<Rat> coords);

  const EtaleAlgebra& algebra() const { return algebra_; }
  const std::vector<Rat>& coords() const { return coords_; }
  const Rat& coord(unsigned mask) const { return coords_[mask]; }

  bool is_zero() const;
  bool is_rational() const;  // only the constant coordinate may be nonzero
  bool is_unit() const;
  /// Largest index of a generator appearing with nonzero coefficient, or -1.
  int top_generator() const;

  EtaleElement operator+(const EtaleElement& o) const;
  EtaleElement operator-(const EtaleElement& o) const;
  EtaleElement operator-() const;
  EtaleElement operator*(const EtaleElement& o) const;
  EtaleElement operator*(const Rat& q) const;
  EtaleElement& operator+=(const EtaleElement& o) { return *this = *this + o; }
  EtaleElement& operator*=(const EtaleElement& o) { return *this = *this * o; }

  EtaleElement inverse() const;  // throws NotAUnit
  EtaleElement operator/(const EtaleElement& o) const { return *this * o.inverse(); }
  EtaleElement pow(long e) const;
  /// Involution negating the i-th root.
  EtaleElement conj(int i) const;

  /// Image in the field component c.
  EtaleElement to_component(std::size_t c) const;

  std::string str() const;

  friend bool operator==(const EtaleElement& a, const EtaleElement& b);
  friend bool operator!=(const EtaleElement& a, const EtaleElement& b) { return !(a == b); }

 private:
  EtaleAlgebra algebra_;
  std::vector<Rat> coords_;
};

EtaleElement operator*(const Rat& q, const EtaleElement& x);

/// Reassembles an element from its images in all field components.
EtaleElement from_components(const EtaleAlgebra& algebra, const std::vector<EtaleElement>& parts);

/// N_{E/E0} where E0 = E.prefix(k).
EtaleElement norm(const EtaleElement& x, int k = 0);
/// Tr_{E/E0} where E0 = E.prefix(k).
EtaleElement trace(const EtaleElement& x, int k = 0);
/// Rational value of N_{E/Q}.
Rat norm_to_q(const EtaleElement& x);

/// Views x (whose coordinates only involve the first k roots) as an element of E.prefix(k).
EtaleElement restrict_to_prefix(const EtaleElement& x, int k);
/// Embeds an element of E.prefix(k) into E.
EtaleElement extend_from_prefix(const EtaleElement& x, const EtaleAlgebra& big);

struct SquareRootResult {
  bool is_square = false;
  std::vector<bool> component_is_square;
  std::vector<std::optional<EtaleElement>> component_roots;  // in component fields
  std::optional<EtaleElement> root;  // global witness when is_square
};

SquareRootResult is_square_with_witness(const EtaleElement& x);

/// Ring map given by x_i -> coefficient_i * y_{mask_i} into another algebra.
class AlgebraMap {
 public:
  struct Image {
    Rat coefficient;
    unsigned mask;
  };
  AlgebraMap(EtaleAlgebra source, EtaleAlgebra target, std::vector<Image> images);

  /// Sends x_i to the first target monomial of the same square class (positive coefficient).
  static AlgebraMap canonical(const EtaleAlgebra& source, const EtaleAlgebra& target);

  const EtaleAlgebra& source() const { return source_; }
  const EtaleAlgebra& target() const { return target_; }
  EtaleElement operator()(const EtaleElement& x) const;

 private:
  EtaleAlgebra source_, target_;
  std::vector<Image> monomial_images_;  // per source monomial
};

/// Adjoin to Q; convenience for F_a, F_{a,d}.
EtaleAlgebra quadratic_algebra(const SquareClass& a);
EtaleAlgebra biquadratic_algebra(const SquareClass& a, const SquareClass& d);

}  // namespace massey4
