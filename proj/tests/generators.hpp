#pragma once

// Random DefinedCertificates: alpha in F_a, delta in F_d with small coordinates, kept when
// (alpha, delta) passes in_image_of_ground and N(delta) is not a square.

#include <optional>
#include <random>

#include "massey4/brauer.hpp"
#include "massey4/massey.hpp"

namespace massey4::testing {

class CertificateGenerator {
 public:
  explicit CertificateGenerator(unsigned seed) : rng_(seed) {}

  int ri(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::optional<DefinedCertificate> try_next() {
    const SquareClass a = squarefree_class(Rat(ri(-15, 15) | 1));
    const SquareClass d = squarefree_class(Rat(ri(-15, 15) | 1));
    const EtaleAlgebra Fa = quadratic_algebra(a), Fd = quadratic_algebra(d);
    const EtaleElement alpha = Fa.from_coords({ri(-6, 6), ri(-4, 4)});
    const EtaleElement delta = Fd.from_coords({ri(-6, 6), ri(1, 4)});
    if (!alpha.is_unit() || !delta.is_unit()) return std::nullopt;
    const Rat c = norm_to_q(delta);
    if (rational_sqrt(c)) return std::nullopt;
    const MasseyInputs in{a, squarefree_class(norm_to_q(alpha)), squarefree_class(c), d};
    const EtaleAlgebra Fad = biquadratic_algebra(a, d);
    if (!in_image_of_ground(symbol(embed_first(alpha, Fad), embed_second(delta, Fad)))) return std::nullopt;
    return DefinedCertificate{in, alpha, delta};
  }

  DefinedCertificate next() {
    for (;;) {
      if (auto c = try_next()) return *c;
    }
  }

 private:
  std::mt19937 rng_;
};

}  // namespace massey4::testing
