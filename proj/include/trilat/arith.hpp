#pragma once

// Integer arithmetic shared by every verifier: gcd, checked products,
// trial-division factorization against a sieved prime table, unit
// enumeration, and the prime table itself (with fixed-point logarithms).

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "trilat/fixed.hpp"

namespace trilat::arith {

/// Largest integer accepted by factorize(). Keeps 2n and n*n intermediates
/// comfortably inside 64/128-bit arithmetic.
inline constexpr std::uint64_t kMaxInput = std::uint64_t{1} << 40;

/// Default ceiling on PrimeTable::limit(); overridable per call.
inline constexpr std::uint64_t kDefaultSieveCap = 200'000'000;

/// Limits above this are sieved segment by segment.
inline constexpr std::uint64_t kSegmentedThreshold = 10'000'000;

std::uint64_t gcd(std::uint64_t a, std::uint64_t b);

/// a * b, throwing DomainError on 64-bit overflow.
std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b);

/// floor(sqrt(n)), exact for all 64-bit n.
std::uint64_t isqrt(std::uint64_t n);

struct PrimePower {
  std::uint64_t prime;
  unsigned exponent;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

class FactoredInteger {
 public:
  FactoredInteger(std::uint64_t value, std::vector<PrimePower> factors);

  std::uint64_t value() const { return value_; }
  const std::vector<PrimePower>& factors() const { return factors_; }
  std::uint64_t phi() const { return phi_; }
  std::uint64_t radical() const { return radical_; }
  std::size_t omega() const { return factors_.size(); }

  /// Largest prime divisor, or 1 for value 1.
  std::uint64_t largest_prime() const { return factors_.empty() ? 1 : factors_.back().prime; }
  /// Second largest distinct prime divisor, or 1 if there is none.
  std::uint64_t second_largest_prime() const {
    return factors_.size() < 2 ? 1 : factors_[factors_.size() - 2].prime;
  }

 private:
  std::uint64_t value_;
  std::vector<PrimePower> factors_;
  std::uint64_t phi_;
  std::uint64_t radical_;
};

struct SieveOptions {
  std::uint64_t max_limit = kDefaultSieveCap;
  std::uint64_t segment_bytes = std::uint64_t{1} << 18;
};

/// All primes up to a limit, each with ln(p) in 60-fractional-bit fixed
/// point. Immutable once built.
class PrimeTable {
 public:
  std::uint64_t limit() const { return limit_; }
  std::span<const std::uint64_t> primes() const { return primes_; }
  std::span<const Fixed60> logs() const { return logs_; }

  /// Number of primes <= x (x may exceed the limit only if x <= limit).
  std::size_t count_upto(std::uint64_t x) const;

 private:
  friend PrimeTable sieve(std::uint64_t limit, const SieveOptions& options);

  std::uint64_t limit_ = 0;
  std::vector<std::uint64_t> primes_;
  std::vector<Fixed60> logs_;
};

/// Sieve of Eratosthenes; segmented above kSegmentedThreshold.
/// Throws DomainError for limit < 2, CapabilityError above options.max_limit.
PrimeTable sieve(std::uint64_t limit, const SieveOptions& options = {});

/// Shared table covering every prime up to 2^20, enough to factor any
/// input up to kMaxInput. Built once on first use.
const PrimeTable& default_table();

/// Trial division by the table's primes.
/// Requires table.limit()^2 >= n; otherwise throws CapabilityError naming
/// the limit that would be needed.
FactoredInteger factorize(std::uint64_t n, const PrimeTable& table);

/// Units of Z/nZ in [1, n), ascending. Empty for n = 1.
std::vector<std::uint64_t> units(std::uint64_t n);

/// Smallest-prime-factor table for bulk factorization of every integer in
/// [1, limit]. Used by the range checks, where per-integer trial division
/// would dominate.
class SmallestFactorTable {
 public:
  explicit SmallestFactorTable(std::uint32_t limit);

  std::uint32_t limit() const { return static_cast<std::uint32_t>(spf_.size() - 1); }
  std::uint32_t smallest_factor(std::uint32_t n) const { return spf_[n]; }

  /// Distinct primes of n, ascending.
  void distinct_primes(std::uint32_t n, std::vector<std::uint64_t>& out) const;
  std::uint32_t radical(std::uint32_t n) const;
  unsigned omega(std::uint32_t n) const;

 private:
  std::vector<std::uint32_t> spf_;
};

}  // namespace trilat::arith
