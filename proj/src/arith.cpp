#include "trilat/arith.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "trilat/errors.hpp"

namespace trilat::arith {

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw DomainError("checked_mul: " + std::to_string(a) + " * " + std::to_string(b) + " overflows 64 bits");
  }
  return out;
}

std::uint64_t isqrt(std::uint64_t n) {
  std::uint64_t r = static_cast<std::uint64_t>(__builtin_sqrtl(static_cast<long double>(n)));
  while (r > 0 && u128(r) * r > n) --r;
  while (u128(r + 1) * (r + 1) <= n) ++r;
  return r;
}

FactoredInteger::FactoredInteger(std::uint64_t value, std::vector<PrimePower> factors)
    : value_(value), factors_(std::move(factors)), phi_(value), radical_(1) {
  for (const auto& [p, e] : factors_) {
    phi_ = phi_ / p * (p - 1);
    radical_ *= p;
  }
}

std::size_t PrimeTable::count_upto(std::uint64_t x) const {
  return static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), x) - primes_.begin());
}

namespace {

// Odd-only sieve; index i stands for 2i + 1.
std::vector<std::uint64_t> simple_sieve(std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  if (limit < 2) return out;
  out.push_back(2);
  const std::uint64_t half = (limit - 1) / 2 + 1;  // odd numbers 1..limit
  std::vector<std::uint8_t> composite(half, 0);
  composite[0] = 1;
  for (std::uint64_t i = 1; i < half; ++i) {
    if (composite[i]) continue;
    const std::uint64_t p = 2 * i + 1;
    out.push_back(p);
    for (std::uint64_t m = p * p; m <= limit; m += 2 * p) composite[m / 2] = 1;
  }
  return out;
}

std::vector<std::uint64_t> segmented_sieve(std::uint64_t limit, std::uint64_t segment_odds) {
  const std::vector<std::uint64_t> base = simple_sieve(isqrt(limit));
  std::vector<std::uint64_t> out = base;
  std::vector<std::uint8_t> composite(segment_odds);
  // Segments cover odd numbers in [low, high], starting just above the base.
  std::uint64_t low = (base.empty() ? 2 : base.back()) + 1;
  if (low % 2 == 0) ++low;
  while (low <= limit) {
    const std::uint64_t high = std::min(limit, low + 2 * (segment_odds - 1));
    const std::uint64_t count = (high - low) / 2 + 1;
    std::fill_n(composite.begin(), count, 0);
    for (std::size_t k = 1; k < base.size(); ++k) {
      const std::uint64_t p = base[k];
      if (p * p > high) break;
      std::uint64_t start = std::max(p * p, (low + p - 1) / p * p);
      if (start % 2 == 0) start += p;
      for (std::uint64_t m = start; m <= high; m += 2 * p) composite[(m - low) / 2] = 1;
    }
    for (std::uint64_t i = 0; i < count; ++i) {
      if (!composite[i]) out.push_back(low + 2 * i);
    }
    low = high + 2;
  }
  return out;
}

}  // namespace

PrimeTable sieve(std::uint64_t limit, const SieveOptions& options) {
  if (limit < 2) throw DomainError("sieve: limit must be at least 2");
  if (limit > options.max_limit) {
    throw CapabilityError("sieve: limit " + std::to_string(limit) + " exceeds the configured cap " +
                          std::to_string(options.max_limit));
  }
  PrimeTable table;
  table.limit_ = limit;
  table.primes_ = limit > kSegmentedThreshold ? segmented_sieve(limit, std::max<std::uint64_t>(options.segment_bytes, 1024))
                                              : simple_sieve(limit);
  table.logs_.reserve(table.primes_.size());
  for (std::uint64_t p : table.primes_) table.logs_.push_back(fixed_log<60>(p));
  return table;
}

const PrimeTable& default_table() {
  static const PrimeTable table = sieve(std::uint64_t{1} << 20);
  return table;
}

FactoredInteger factorize(std::uint64_t n, const PrimeTable& table) {
  if (n == 0) throw DomainError("factorize: n must be positive");
  if (n > kMaxInput) throw CapabilityError("factorize: n = " + std::to_string(n) + " exceeds 2^40");
  if (u128(table.limit()) * table.limit() < n) {
    std::uint64_t need = isqrt(n);
    if (need * need < n) ++need;
    throw CapabilityError("factorize: prime table limit " + std::to_string(table.limit()) +
                          " too small for n = " + std::to_string(n) + "; need limit >= " + std::to_string(need));
  }
  std::vector<PrimePower> factors;
  std::uint64_t rest = n;
  for (std::uint64_t p : table.primes()) {
    if (p * p > rest) break;
    if (rest % p != 0) continue;
    unsigned e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    factors.push_back({p, e});
  }
  if (rest > 1) factors.push_back({rest, 1});
  return FactoredInteger(n, std::move(factors));
}

std::vector<std::uint64_t> units(std::uint64_t n) {
  if (n == 0) throw DomainError("units: n must be positive");
  std::vector<std::uint64_t> out;
  for (std::uint64_t a = 1; a < n; ++a) {
    if (std::gcd(a, n) == 1) out.push_back(a);
  }
  return out;
}

SmallestFactorTable::SmallestFactorTable(std::uint32_t limit) : spf_(std::size_t{limit} + 1, 0) {
  if (limit >= 1) spf_[1] = 1;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (spf_[i] != 0) continue;
    for (std::uint64_t m = i; m <= limit; m += i) {
      if (spf_[m] == 0) spf_[m] = static_cast<std::uint32_t>(i);
    }
  }
}

void SmallestFactorTable::distinct_primes(std::uint32_t n, std::vector<std::uint64_t>& out) const {
  out.clear();
  while (n > 1) {
    const std::uint32_t p = spf_[n];
    out.push_back(p);
    while (n % p == 0) n /= p;
  }
}

std::uint32_t SmallestFactorTable::radical(std::uint32_t n) const {
  std::uint32_t r = 1;
  while (n > 1) {
    const std::uint32_t p = spf_[n];
    r *= p;
    while (n % p == 0) n /= p;
  }
  return r;
}

unsigned SmallestFactorTable::omega(std::uint32_t n) const {
  unsigned k = 0;
  while (n > 1) {
    const std::uint32_t p = spf_[n];
    ++k;
    while (n % p == 0) n /= p;
  }
  return k;
}

}  // namespace trilat::arith
