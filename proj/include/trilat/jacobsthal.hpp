#pragma once

// Jacobsthal's function g(n), the largest gap between consecutive integers
// coprime to n, and f(n), the least a >= 1 with a(a + 2) coprime to n,
// together with the bound checks built on them.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "trilat/arith.hpp"

namespace trilat::jacobsthal {

/// Largest radical the circular scan will handle.
inline constexpr std::uint64_t kMaxScanRadical = 20'000'000;
/// Largest k accepted by primorial_g: P_8 = 9699690.
inline constexpr int kMaxPrimorialIndex = 8;
/// Largest limit accepted by the range checks.
inline constexpr std::uint64_t kMaxRangeLimit = 10'000'000;

/// g(n) with a certificate: x < y are consecutive integers coprime to n
/// and y - x = g.
struct GapScanResult {
  std::uint64_t n = 1;
  std::uint64_t g = 1;
  std::uint64_t x = 0;
  std::uint64_t y = 1;

  friend bool operator==(const GapScanResult&, const GapScanResult&) = default;
};

/// Bounded memo keyed by radical. Lookups take a shared lock and only bump
/// an atomic recency stamp; inserts are serialized and, when full, evict the
/// least recently used half in one pass.
class GapCache {
 public:
  explicit GapCache(std::size_t capacity = 4096);

  std::optional<GapScanResult> find(std::uint64_t radical) const;
  void insert(std::uint64_t radical, const GapScanResult& result);
  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }

 private:
  struct Entry {
    GapScanResult result;
    mutable std::atomic<std::uint64_t> stamp;
  };

  std::size_t capacity_;
  mutable std::shared_mutex mutex_;
  mutable std::atomic<std::uint64_t> clock_{0};
  std::unordered_map<std::uint64_t, Entry> entries_;
};

/// Circular scan over [0, 2 * rad] of the integers coprime to the given
/// primes (rad = their product). Certificate is the first maximal gap.
GapScanResult scan_gap(std::span<const std::uint64_t> primes);

/// g for the given distinct primes by an exhaustive residue-class covering
/// search: g - 1 is the longest run 1..L in which every position is hit by
/// the class chosen for some prime. Independent of scan_gap and far faster
/// for large radicals, but returns no certificate.
std::uint64_t gap_by_covering(std::span<const std::uint64_t> primes);

/// Exact g(n) via scan_gap on radical(n). g(1) = 1.
/// Throws CapabilityError when radical(n) exceeds kMaxScanRadical.
GapScanResult jacobsthal_g(std::uint64_t n, GapCache* cache = nullptr,
                           const arith::PrimeTable& table = arith::default_table());

/// Least a >= 1 with gcd(a (a + 2), n) = 1.
std::uint64_t f_least(std::uint64_t n);

/// Integers in [1, limit] outside {1, 2, 3, 4, 6} with 5 g(n) > 2 n.
std::vector<GapScanResult> check_g_linear_bound(std::uint64_t limit, unsigned workers = 1);

struct FBoundViolation {
  enum class Kind { top_two_primes, at_most_17 };
  Kind kind;
  std::uint64_t n;
  std::uint64_t f;
  std::uint64_t p1;  // largest prime divisor
  std::uint64_t p2;  // second largest prime divisor (1 if none)
};

/// For every n <= limit: if both top primes exceed 3, f(n) p1 p2 <= 5 n;
/// if gcd(n, 143) = 1 or gcd(n, 323) = 1, f(n) <= 17. Returns violators.
std::vector<FBoundViolation> check_f_bounds(std::uint64_t limit, unsigned workers = 1);

/// g(P_k) for the product of the first k primes, 1 <= k <= 8.
GapScanResult primorial_g(int k);

/// All n <= limit with exactly k distinct prime divisors and g(n) > g(P_k),
/// with certificates. 1 <= k <= 8.
std::vector<GapScanResult> check_g_omega_monotone(int k, std::uint64_t limit, unsigned workers = 1);

}  // namespace trilat::jacobsthal
