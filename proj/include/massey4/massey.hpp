#pragma once

// Fourfold mod 2 Massey products <a,b,c,d> over Q: certificates of definedness,
// the (x, nu) construction, and assembly of vanishing witnesses.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "massey4/brauer.hpp"
#include "massey4/etale.hpp"
#include "massey4/funcfield.hpp"

namespace massey4 {

struct MasseyInputs {
  SquareClass a, b, c, d;
};

MasseyInputs normalize_inputs(const Rat& a, const Rat& b, const Rat& c, const Rat& d);

struct DefinedCertificate {
  MasseyInputs in;
  EtaleElement alpha;  // in F_a
  EtaleElement delta;  // in F_d
};

struct CertificateReport {
  bool ok = false;
  std::vector<std::string> failed;  // "norm-b", "norm-c", "symbol", "image"
  BrauerClass2 symbol;               // (alpha, delta) over F_{a,d}
};

CertificateReport check_vanish_certificate(const MasseyInputs& in, const EtaleElement& alpha,
                                           const EtaleElement& delta);
CertificateReport check_defined_certificate(const MasseyInputs& in, const EtaleElement& alpha,
                                            const EtaleElement& delta);

struct SearchOutcome {
  std::optional<DefinedCertificate> certificate;
  /// When (a, b) or (d, c) is locally obstructed: "(a,b) at p=3" and the like.
  std::optional<std::string> obstruction;
  std::uint64_t tried = 0;
};

/// Semi-decision: scans (alpha0 r, delta0 s) over small squarefree r, s.
SearchOutcome search_defined_certificate(const MasseyInputs& in, std::uint64_t budget);

struct XNuTrace {
  EtaleElement alpha1, alpha2;  // alpha = alpha1^2 - c alpha2^2
  Rat u1, u2;                   // delta = u1 + u2 sqrt(d)
  bool dependent = false;
  std::array<Rat, 2> p0{};      // auxiliary regular point
  EtaleElement eta;
  std::array<Rat, 2> point{};   // P with h(P) = eta
  bool swapped = false;         // parameter order used at P
  Rat x_value;                  // s_{P,pi}(f) before removing rational squares
  EtaleElement nu_value;        // s_{P',pi'}(g) before removing rational squares
};

struct XNuResult {
  Rat x;
  EtaleElement nu;
  XNuTrace trace;
};

/// Requires c not a square, N(delta) = c exactly and (alpha, delta) in the image of Br(Q)[2].
/// variant > 0 multiplies eta by a small element of F_a whose norm is a norm from F_d.
XNuResult construct_x_nu(const SquareClass& a, const Rat& c, const SquareClass& d, const EtaleElement& alpha,
                         const EtaleElement& delta, std::size_t variant = 0);

/// alpha = alpha1^2 - c alpha2^2 with alpha1, alpha2 in F_a; c not a square.
std::pair<EtaleElement, EtaleElement> split_alpha(const SquareClass& a, const Rat& c, const EtaleElement& alpha);

/// The functions f, h1, h2, h, g over F_a(x1, x2) built from alpha1, alpha2, c, u1.
struct PipelineFunctions {
  BivariatePoly f, h1, h2, h;
  BivariateRat g;
};
PipelineFunctions pipeline_functions(const EtaleElement& alpha1, const EtaleElement& alpha2, const Rat& c,
                                     const Rat& u1);

/// One residue computation of B = (alpha f, g) + (d, h).
struct ResidueCheck {
  std::string label;     // "D1", "D2", "D3" (per field component of F_a) or "N(B)"
  std::string divisor;
  std::string residue;   // the computed class
  std::string expected;  // "trivial" or the class it must equal
  bool ok = false;
};
/// Residues at the components of x1^2 = c x2^2, h2 = 0, h = 0, and of the corestriction at
/// x1^2 = c x2^2, N(h2) = 0, N(h) = 0 and two auxiliary lines over Q.
std::vector<ResidueCheck> pipeline_residue_checks(const SquareClass& a, const Rat& c, const SquareClass& d,
                                                  const EtaleElement& alpha1, const EtaleElement& alpha2,
                                                  const Rat& u1);

/// zeta = p + q sqrt(alpha') over F_{a,d} with p^2 - alpha' q^2 = delta', so (alpha', delta') = 0.
struct NormCertificate {
  EtaleElement p, q;
};

struct Witness {
  MasseyInputs in;
  EtaleElement alpha, delta;  // alpha' in F_a, delta' in F_d
  std::optional<NormCertificate> certificate;
  std::string branch;         // "c-square" or "general"
  // Intermediate data of the general branch.
  std::optional<XNuResult> x_nu;
  Rat c_exact;
  Int y = 1;
  std::optional<DefinedCertificate> used;
};

/// Vanishing witness; uses the given certificate or searches for one.
Witness vanish_witness(const MasseyInputs& in, const std::optional<DefinedCertificate>& cert,
                       std::uint64_t budget);
/// The x, nu, y route from a certificate; requires N(delta) not a rational square.
Witness general_branch_witness(const DefinedCertificate& cert);

/// Checks p^2 - alpha' q^2 = delta' exactly in F_{a,d}.
bool verify_norm_certificate(const Witness& w);

/// F_a -> F_{a,d} and F_d -> F_{a,d}.
EtaleElement embed_first(const EtaleElement& x, const EtaleAlgebra& Fad);
EtaleElement embed_second(const EtaleElement& x, const EtaleAlgebra& Fad);

}  // namespace massey4
