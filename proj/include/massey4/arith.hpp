#pragma once

// Exact integer/rational arithmetic, factorization and square classes of Q.

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace massey4 {

using Int = mpz_class;
using Rat = mpq_class;

enum class ErrorKind {
  FactorizationBoundExceeded,
  GeneratorLimitExceeded,
  NotAUnit,
  PrecisionExhausted,
  AlgebraMismatch,
  NoSolutionInSupport,
  NotSplitByFa,
  SearchBoundExceeded,
  NoSolution,
  PreconditionFailed,
  VerificationFailed,
  ZeroDivisorOnRestriction,
  NoCertificate,
  InvalidInput,
};

const char* to_string(ErrorKind kind);

class MathError : public std::runtime_error {
 public:
  MathError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Tunables shared by every search and local computation.
struct Config {
  /// Integers with more decimal digits than this are refused by factor().
  int factor_digits = 60;
  /// Pollard rho iterations allowed per composite cofactor.
  std::uint64_t rho_iterations = 4'000'000;
  /// Upper bound for p-adic precision (exponent k in p^k).
  int precision_cap = 4096;
  /// Generic step budget for bounded searches.
  std::uint64_t budget = 20000;
  /// Extra primes tried when an F2-linear S-unit system is insoluble.
  int support_enlargements = 10;
  std::uint64_t seed = 1;
};

const Config& config();

/// Installs a configuration for the current thread for the lifetime of the guard.
class ScopedConfig {
 public:
  explicit ScopedConfig(const Config& cfg);
  ~ScopedConfig();
  ScopedConfig(const ScopedConfig&) = delete;
  ScopedConfig& operator=(const ScopedConfig&) = delete;

 private:
  const Config* previous_;
  Config current_;
};

// ---------------------------------------------------------------------------
// Factorization

struct FactoredInt {
  int sign = 1;
  std::vector<std::pair<Int, unsigned>> factors;  // primes strictly increasing

  Int value() const;
};

bool is_probable_prime(const Int& n);
Int next_prime(const Int& n);  // smallest prime > n

/// Complete factorization; throws FactorizationBoundExceeded past the configured bound.
FactoredInt factor(const Int& n);
/// Forgets the factorizations and large primes remembered by factor() on this thread.
void clear_factor_hints();

/// Primes dividing numerator or denominator of q.
std::vector<Int> prime_support(const Rat& q);

/// Exponent of p in q (q != 0).
long valuation(const Rat& q, const Int& p);
long valuation(const Int& n, const Int& p);

// ---------------------------------------------------------------------------
// Square classes of Q

/// Element of Q^x / Q^x2, stored as its signed squarefree integer representative.
class SquareClass {
 public:
  SquareClass() : rep_(1) {}
  /// Trusts that rep is a nonzero squarefree integer.
  static SquareClass from_squarefree(Int rep);

  const Int& rep() const { return rep_; }
  bool is_trivial() const { return rep_ == 1; }
  std::string str() const { return rep_.get_str(); }

  SquareClass operator*(const SquareClass& other) const;

  friend bool operator==(const SquareClass& a, const SquareClass& b) { return a.rep_ == b.rep_; }
  friend bool operator!=(const SquareClass& a, const SquareClass& b) { return a.rep_ != b.rep_; }
  friend bool operator<(const SquareClass& a, const SquareClass& b) { return a.rep_ < b.rep_; }

 private:
  explicit SquareClass(Int rep) : rep_(std::move(rep)) {}
  Int rep_;
};

/// Squarefree representative of q modulo squares.
SquareClass squarefree_class(const Rat& q);

/// q = root^2 * squarefree_class(q).rep(); returns the rational root (positive).
Rat square_cofactor(const Rat& q);

/// Kronecker symbol (a / n), n != 0.
int kronecker_symbol(const Int& a, const Int& n);

/// Square root of a modulo the prime p (Tonelli-Shanks), in [0, p); nullopt for non-residues.
std::optional<Int> sqrt_mod_prime(const Int& a, const Int& p);

/// Exact rational square root if q is a square.
std::optional<Rat> rational_sqrt(const Rat& q);

// ---------------------------------------------------------------------------
// Formatting helpers (exact rationals as "p/q" strings)

std::string to_string(const Rat& q);
Rat parse_rational(const std::string& text);  // throws InvalidInput

}  // namespace massey4
