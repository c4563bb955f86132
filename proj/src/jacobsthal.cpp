#include "trilat/jacobsthal.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <numeric>
#include <string>

#include "trilat/errors.hpp"
#include "trilat/parallel.hpp"

namespace trilat::jacobsthal {

GapCache::GapCache(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 2)) {}

std::optional<GapScanResult> GapCache::find(std::uint64_t radical) const {
  std::shared_lock lock(mutex_);
  const auto it = entries_.find(radical);
  if (it == entries_.end()) return std::nullopt;
  it->second.stamp.store(clock_.fetch_add(1, std::memory_order_relaxed) + 1, std::memory_order_relaxed);
  return it->second.result;
}

void GapCache::insert(std::uint64_t radical, const GapScanResult& result) {
  std::unique_lock lock(mutex_);
  if (entries_.size() >= capacity_ && !entries_.contains(radical)) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> by_age;
    by_age.reserve(entries_.size());
    for (const auto& [key, entry] : entries_) by_age.emplace_back(entry.stamp.load(std::memory_order_relaxed), key);
    const auto half = by_age.begin() + static_cast<std::ptrdiff_t>(by_age.size() / 2);
    std::nth_element(by_age.begin(), half, by_age.end());
    for (auto it = by_age.begin(); it != half; ++it) entries_.erase(it->second);
  }
  auto [it, inserted] = entries_.try_emplace(radical);
  it->second.result = result;
  it->second.stamp.store(clock_.fetch_add(1, std::memory_order_relaxed) + 1, std::memory_order_relaxed);
}

std::size_t GapCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

GapScanResult scan_gap(std::span<const std::uint64_t> primes) {
  std::uint64_t rad = 1;
  for (std::uint64_t p : primes) {
    if (rad > kMaxScanRadical / p) {
      throw CapabilityError("scan_gap: radical exceeds the scan cap " + std::to_string(kMaxScanRadical));
    }
    rad *= p;
  }
  if (rad == 1) return {1, 1, 0, 1};

  // One period of the coprimality pattern; the scan walks two periods so
  // that the gap straddling the period boundary is seen.
  std::vector<std::uint8_t> shared(rad, 0);
  for (std::uint64_t p : primes) {
    for (std::uint64_t m = 0; m < rad; m += p) shared[m] = 1;
  }
  GapScanResult best{rad, 0, 0, 0};
  std::optional<std::uint64_t> last;
  for (std::uint64_t x = 0; x <= 2 * rad; ++x) {
    if (shared[x < rad ? x : (x < 2 * rad ? x - rad : 0)]) continue;
    if (last && x - *last > best.g) best = {rad, x - *last, *last, x};
    last = x;
  }
  return best;
}

namespace {

// Positions 1..255 of a candidate run of non-coprime integers.
struct RunMask {
  static constexpr int kBits = 256;
  std::array<std::uint64_t, 4> words{};

  void set(unsigned i) { words[i >> 6] |= std::uint64_t{1} << (i & 63); }
  // First unset position >= 1.
  unsigned first_gap() const {
    for (unsigned w = 0; w < 4; ++w) {
      std::uint64_t free = ~words[w];
      if (w == 0) free &= ~std::uint64_t{1};
      if (free != 0) return w * 64 + static_cast<unsigned>(__builtin_ctzll(free));
    }
    return kBits;
  }
};

struct CoverSearch {
  std::span<const std::uint64_t> primes;
  unsigned best = 0;

  void run(const RunMask& covered, std::uint32_t used) {
    const unsigned gap = covered.first_gap();
    if (gap >= RunMask::kBits) throw CapabilityError("gap_by_covering: run exceeds 255");
    best = std::max(best, gap - 1);
    for (std::size_t k = 0; k < primes.size(); ++k) {
      if (used & (1u << k)) continue;
      RunMask next = covered;
      for (std::uint64_t pos = gap; pos < RunMask::kBits; pos += primes[k]) next.set(static_cast<unsigned>(pos));
      run(next, used | (1u << k));
    }
  }
};

}  // namespace

std::uint64_t gap_by_covering(std::span<const std::uint64_t> primes) {
  if (primes.size() > 16) throw CapabilityError("gap_by_covering: more than 16 primes");
  CoverSearch search{primes};
  search.run(RunMask{}, 0);
  return search.best + 1;
}

GapScanResult jacobsthal_g(std::uint64_t n, GapCache* cache, const arith::PrimeTable& table) {
  if (n == 0) throw DomainError("jacobsthal_g: n must be positive");
  const auto fact = arith::factorize(n, table);
  const std::uint64_t rad = fact.radical();
  if (rad > kMaxScanRadical) {
    throw CapabilityError("jacobsthal_g: radical " + std::to_string(rad) + " exceeds the scan cap " +
                          std::to_string(kMaxScanRadical));
  }
  GapScanResult result;
  if (auto hit = cache ? cache->find(rad) : std::nullopt) {
    result = *hit;
  } else {
    std::vector<std::uint64_t> primes;
    for (const auto& pp : fact.factors()) primes.push_back(pp.prime);
    result = scan_gap(primes);
    if (cache) cache->insert(rad, result);
  }
  result.n = n;
  return result;
}

std::uint64_t f_least(std::uint64_t n) {
  if (n == 0) throw DomainError("f_least: n must be positive");
  for (std::uint64_t a = 1;; ++a) {
    if (std::gcd(a, n) == 1 && std::gcd(a + 2, n) == 1) return a;
  }
}

namespace {

void check_range_limit(std::uint64_t limit, const char* what) {
  if (limit > kMaxRangeLimit) {
    throw CapabilityError(std::string(what) + ": limit " + std::to_string(limit) + " exceeds " +
                          std::to_string(kMaxRangeLimit));
  }
}

// g of every squarefree m <= limit (zero elsewhere), by covering search.
std::vector<std::uint16_t> gaps_of_radicals(const arith::SmallestFactorTable& spf, std::uint64_t limit,
                                            unsigned workers) {
  std::vector<std::uint16_t> g(limit + 1, 0);
  constexpr std::size_t kBlock = 4096;
  parallel_for((limit + kBlock) / kBlock, workers, [&](std::size_t block) {
    std::vector<std::uint64_t> primes;
    const std::uint64_t lo = std::max<std::uint64_t>(1, block * kBlock);
    const std::uint64_t hi = std::min<std::uint64_t>(limit, (block + 1) * kBlock - 1);
    for (std::uint64_t m = lo; m <= hi; ++m) {
      if (spf.radical(static_cast<std::uint32_t>(m)) != m) continue;
      spf.distinct_primes(static_cast<std::uint32_t>(m), primes);
      g[m] = static_cast<std::uint16_t>(gap_by_covering(primes));
    }
  });
  return g;
}

GapScanResult certify(std::uint64_t n, const arith::SmallestFactorTable& spf) {
  std::vector<std::uint64_t> primes;
  spf.distinct_primes(static_cast<std::uint32_t>(n), primes);
  GapScanResult r = scan_gap(primes);
  r.n = n;
  return r;
}

}  // namespace

std::vector<GapScanResult> check_g_linear_bound(std::uint64_t limit, unsigned workers) {
  check_range_limit(limit, "check_g_linear_bound");
  std::vector<GapScanResult> out;
  if (limit < 5) return out;
  const arith::SmallestFactorTable spf(static_cast<std::uint32_t>(limit));

  // Radical dedup: g(n) = g(rad n), and the radicals <= limit are exactly
  // the squarefree integers <= limit.
  const auto g = gaps_of_radicals(spf, limit, workers);
  for (std::uint64_t n = 1; n <= limit; ++n) {
    if (n <= 4 || n == 6) continue;
    const std::uint32_t rad = spf.radical(static_cast<std::uint32_t>(n));
    if (5 * std::uint64_t{g[rad]} > 2 * n) {
      GapScanResult r = certify(rad, spf);
      r.n = n;
      out.push_back(r);
    }
  }
  return out;
}

std::vector<FBoundViolation> check_f_bounds(std::uint64_t limit, unsigned workers) {
  check_range_limit(limit, "check_f_bounds");
  std::vector<FBoundViolation> out;
  if (limit == 0) return out;
  const arith::SmallestFactorTable spf(static_cast<std::uint32_t>(limit));

  constexpr std::size_t kBlock = 1 << 14;
  const std::size_t blocks = (limit + kBlock) / kBlock;
  std::vector<std::vector<FBoundViolation>> found(blocks);
  parallel_for(blocks, workers, [&](std::size_t block) {
    std::vector<std::uint64_t> primes;
    const std::uint64_t lo = std::max<std::uint64_t>(1, block * kBlock);
    const std::uint64_t hi = std::min<std::uint64_t>(limit, (block + 1) * kBlock - 1);
    for (std::uint64_t n = lo; n <= hi; ++n) {
      spf.distinct_primes(static_cast<std::uint32_t>(n), primes);
      const std::uint64_t p1 = primes.empty() ? 1 : primes.back();
      const std::uint64_t p2 = primes.size() < 2 ? 1 : primes[primes.size() - 2];
      const std::uint64_t f = f_least(n);
      if (p2 > 3 && f * p1 * p2 > 5 * n) {
        found[block].push_back({FBoundViolation::Kind::top_two_primes, n, f, p1, p2});
      }
      if ((std::gcd(n, std::uint64_t{143}) == 1 || std::gcd(n, std::uint64_t{323}) == 1) && f > 17) {
        found[block].push_back({FBoundViolation::Kind::at_most_17, n, f, p1, p2});
      }
    }
  });
  for (auto& v : found) out.insert(out.end(), v.begin(), v.end());
  return out;
}

GapScanResult primorial_g(int k) {
  if (k < 1 || k > kMaxPrimorialIndex) {
    throw CapabilityError("primorial_g: k = " + std::to_string(k) + " outside 1.." +
                          std::to_string(kMaxPrimorialIndex) + " (P_8 = 9699690 is the largest direct scan)");
  }
  static constexpr std::uint64_t kFirstPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  return scan_gap(std::span(kFirstPrimes, static_cast<std::size_t>(k)));
}

std::vector<GapScanResult> check_g_omega_monotone(int k, std::uint64_t limit, unsigned workers) {
  check_range_limit(limit, "check_g_omega_monotone");
  const GapScanResult reference = primorial_g(k);
  std::vector<GapScanResult> out;
  if (limit < 2) return out;
  const arith::SmallestFactorTable spf(static_cast<std::uint32_t>(limit));
  const auto g = gaps_of_radicals(spf, limit, workers);
  for (std::uint64_t n = 2; n <= limit; ++n) {
    const auto m = static_cast<std::uint32_t>(n);
    if (spf.omega(m) != static_cast<unsigned>(k)) continue;
    const std::uint32_t rad = spf.radical(m);
    if (g[rad] > reference.g) {
      GapScanResult r = certify(rad, spf);
      r.n = n;
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace trilat::jacobsthal
