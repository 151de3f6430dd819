#pragma once

// Diagonal quadratic forms over Q and over quadratic algebras F_a.

#include <optional>
#include <utility>
#include <vector>

#include "massey4/etale.hpp"

namespace massey4 {

/// <q_1, ..., q_n> over Q.
using RationalForm = std::vector<Rat>;

/// Scharlau transfer along s(x + y sqrt a) = y of a diagonal form over F_a.
struct TransferredForm {
  RationalForm diagonal;            // two entries per entry of the source form
  std::vector<EtaleElement> basis;  // F_a-vector realizing each diagonal entry
};

TransferredForm transfer(const std::vector<EtaleElement>& form);

Rat evaluate(const RationalForm& form, const std::vector<Rat>& v);

/// Local isotropy at v (0 for infinity) from dimension, discriminant and Hasse invariant.
bool is_locally_isotropic(const RationalForm& form, const Int& p);
/// Global isotropy (Hasse-Minkowski).
bool is_isotropic(const RationalForm& form);
bool is_hyperbolic(const RationalForm& form);

/// Nonzero v with form(v) = 0, or nullopt when the form is anisotropic.
/// Dimensions up to 6; throws SearchBoundExceeded if the reduction search runs out.
std::optional<std::vector<Rat>> isotropic_vector(const RationalForm& form);

struct AlbertResult {
  Int y;  // squarefree
  /// z, w in F_a with mu (z^2 - pi w^2) = y exactly, when the transfer route produced y.
  std::optional<std::pair<EtaleElement, EtaleElement>> zw;
};

/// y with (pi, mu * y) = 0 over F_a, given N_{F_a/Q}(pi, mu) = 0.
AlbertResult albert_solve(const SquareClass& a, const EtaleElement& pi, const EtaleElement& mu);
Int albert_find_y(const SquareClass& a, const EtaleElement& pi, const EtaleElement& mu);

}  // namespace massey4
