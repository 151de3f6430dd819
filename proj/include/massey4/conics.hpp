#pragma once

// Rational points on conics z^2 = a x^2 + b y^2 and relative quadratic norm equations.

#include <optional>

#include "massey4/etale.hpp"

namespace massey4 {

struct ConicSolution {
  Rat x, y, z;
};

struct ConicResult {
  std::optional<ConicSolution> solution;
  /// A place with (a, b)_v = -1 when there is no solution (0 for infinity).
  std::optional<Int> obstruction;
};

/// Legendre descent after a local solubility check.
ConicResult solve_conic(const Rat& a, const Rat& b);

/// xi in Q(sqrt g) (an element of quadratic_algebra(g)) with N(xi) = t exactly.
/// Throws NoSolution when (g, t) != 0.
EtaleElement solve_rational_norm(const SquareClass& g, const Rat& t);

/// xi in E with N_{E/E0}(xi) = t, where E0 = E.prefix(n - 1) and t is a unit of E0.
/// The top generator of E must be rational. Solutions are always exact, which
/// also satisfies the mod_squares variant of the request.
EtaleElement solve_norm_equation(const EtaleAlgebra& E, const EtaleElement& t,
                                 bool mod_squares = false);

}  // namespace massey4
