#include "trilat/lattice.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <string>

#include "trilat/arith.hpp"
#include "trilat/errors.hpp"
#include "trilat/fixed.hpp"
#include "trilat/parallel.hpp"

namespace trilat::lattice {

namespace {

std::string describe(const Triple& t) {
  return "(" + std::to_string(t.n) + ", " + std::to_string(t.s) + ", " + std::to_string(t.t) + ")";
}

// Residue of u * x mod n written in [1, n] (0 becomes n).
inline std::uint64_t scaled_residue(std::uint64_t u, std::uint64_t x, std::uint64_t n) {
  const std::uint64_t r = static_cast<std::uint64_t>((u128(u) * x) % n);
  return r == 0 ? n : r;
}

inline bool sum_in_window(std::uint64_t sum, std::uint64_t n) { return n < 2 * sum && 2 * sum < 3 * n; }

}  // namespace

bool is_valid_triple(const Triple& t) {
  return t.n >= 1 && t.s >= 1 && t.t >= 1 && t.s <= t.n && t.t <= t.n && std::gcd(std::gcd(t.n, t.s), t.t) == 1;
}

Triple make_triple(std::uint64_t n, std::uint64_t s, std::uint64_t t) {
  const Triple triple{n, s, t};
  if (n == 0) throw DomainError("triple: n must be positive");
  if (s < 1 || s > n || t < 1 || t > n) throw DomainError("triple " + describe(triple) + ": need 1 <= s, t <= n");
  if (std::gcd(std::gcd(n, s), t) != 1) throw DomainError("triple " + describe(triple) + ": gcd(n, s, t) != 1");
  return triple;
}

namespace {

// Scans the units produced by for_each_unit(visit), which stops early when
// visit returns false.
template <typename ForEachUnit>
ConditionReport scan_units(const Triple& triple, ScanMode mode, ForEachUnit&& for_each_unit) {
  const std::uint64_t n = triple.n;
  if (n == 0) throw DomainError("check_condition: n must be positive");
  if (n > arith::kMaxInput) throw CapabilityError("check_condition: n exceeds 2^40");
  const std::uint64_t s = triple.s % n;
  const std::uint64_t t = triple.t % n;

  ConditionReport report;
  std::uint64_t lo = UINT64_MAX;
  std::uint64_t hi = 0;
  bool any = false;
  const bool narrow = n <= (std::uint64_t{1} << 32);
  for_each_unit([&](std::uint64_t a) {
    const std::uint64_t sum = narrow ? (a * s) % n + (a * t) % n
                                     : static_cast<std::uint64_t>((u128(a) * s) % n + (u128(a) * t) % n);
    any = true;
    if (!sum_in_window(sum, n) && report.holds) {
      report.holds = false;
      report.witness = a;
      report.witness_sum = sum;
      if (mode == ScanMode::early_exit) return false;
    }
    lo = std::min(lo, sum);
    hi = std::max(hi, sum);
    return true;
  });
  if (any && (mode == ScanMode::full_scan || report.holds)) {
    report.min_sum = lo;
    report.max_sum = hi;
  }
  return report;
}

}  // namespace

ConditionReport check_condition(const Triple& triple, std::span<const std::uint64_t> units, ScanMode mode) {
  return scan_units(triple, mode, [&](auto&& visit) {
    for (std::uint64_t a : units) {
      if (!visit(a)) return;
    }
  });
}

ConditionReport check_condition(const Triple& triple, ScanMode mode) {
  const std::uint64_t n = triple.n;
  // Units generated on the fly: a full list for n near 2^40 would not fit in memory.
  return scan_units(triple, mode, [n](auto&& visit) {
    for (std::uint64_t a = 1; a < n; ++a) {
      if (std::gcd(a, n) == 1 && !visit(a)) return;
    }
  });
}

std::string_view to_string(Family family) {
  switch (family) {
    case Family::small_n:
      return "SMALL_N";
    case Family::sum:
      return "SUM";
    case Family::s_plus_2t:
      return "S_PLUS_2T";
    case Family::two_s_plus_t:
      return "TWO_S_PLUS_T";
    case Family::half_diff:
      return "HALF_DIFF";
  }
  return "?";
}

std::vector<Family> FamilySet::members() const {
  std::vector<Family> out;
  for (Family f : kAllFamilies) {
    if (contains(f)) out.push_back(f);
  }
  return out;
}

FamilySet classify_families(const Triple& triple) {
  const auto [n, s, t] = triple;
  FamilySet set;
  if (n <= kSmallNThreshold) set.insert(Family::small_n);
  if (s + t == n) set.insert(Family::sum);
  if (s + 2 * t == n) set.insert(Family::s_plus_2t);
  if (2 * s + t == n) set.insert(Family::two_s_plus_t);
  if (n % 2 == 0 && (s > t ? s - t : t - s) == n / 2) set.insert(Family::half_diff);
  return set;
}

ViolationPattern violation_pattern(const Triple& triple) {
  const auto [n, s, t] = triple;
  const bool congruent = (s + t) % n == 0 || (s + 2 * t) % n == 0 || (2 * s + t) % n == 0 ||
                         (n % 2 == 0 && (s + n - t) % n == n / 2);
  if (congruent) return ViolationPattern::congruent_family;
  if (n % 2 == 0 && (s == n / 2 || t == n / 2)) return ViolationPattern::half_modulus;
  return ViolationPattern::other;
}

std::string_view to_string(ViolationPattern pattern) {
  switch (pattern) {
    case ViolationPattern::congruent_family:
      return "congruent_family";
    case ViolationPattern::half_modulus:
      return "half_modulus";
    case ViolationPattern::other:
      return "other";
  }
  return "?";
}

namespace {

std::vector<Triple> orbit_with_units(const Triple& triple, std::span<const std::uint64_t> units) {
  if (triple.n == 1) return {triple};
  std::vector<Triple> out;
  out.reserve(units.size());
  for (std::uint64_t u : units) {
    out.push_back({triple.n, scaled_residue(u, triple.s, triple.n), scaled_residue(u, triple.t, triple.n)});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<Triple> orbit(const Triple& triple) {
  if (triple.n == 0) throw DomainError("orbit: n must be positive");
  const auto u = arith::units(triple.n);
  return orbit_with_units(triple, u);
}

Triple orbit_representative(const Triple& triple) { return orbit(triple).front(); }

std::uint64_t VerificationReport::total_satisfying() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

namespace {

struct ModulusResult {
  std::uint64_t count = 0;
  std::vector<Violation> violations;
  std::vector<Triple> small_n_exceptions;
  std::vector<TripleRecord> records;
};

class ModulusScan {
 public:
  ModulusScan(std::uint64_t n, Recording recording) : n_(n), recording_(recording), units_(arith::units(n)) {}

  ModulusResult run(bool use_orbits) {
    if (use_orbits) {
      scan_orbits();
    } else {
      scan_direct();
    }
    std::sort(result_.violations.begin(), result_.violations.end(),
              [](const Violation& a, const Violation& b) { return a.triple < b.triple; });
    std::sort(result_.small_n_exceptions.begin(), result_.small_n_exceptions.end());
    std::sort(result_.records.begin(), result_.records.end(),
              [](const TripleRecord& a, const TripleRecord& b) { return a.triple < b.triple; });
    return std::move(result_);
  }

 private:
  void scan_direct() {
    for (std::uint64_t s = 1; s <= n_; ++s) {
      const std::uint64_t gs = std::gcd(n_, s);
      for (std::uint64_t t = 1; t <= n_; ++t) {
        if (gs != 1 && std::gcd(gs, t) != 1) continue;
        const Triple triple{n_, s, t};
        const ConditionReport report = check_condition(triple, units_, ScanMode::early_exit);
        if (report.holds) {
          accept(triple);
        } else if (recording_ == Recording::all) {
          result_.records.push_back({triple, false, report.witness, classify_families(triple)});
        }
      }
    }
  }

  // Every orbit contains a member whose first coordinate is d = gcd(n, s)
  // (or n when s = n), and the units fixing d are those congruent to
  // 1 mod n/d. Sweeping t under that stabilizer yields each orbit exactly
  // once, at its lexicographically smallest member.
  void scan_orbits() {
    std::vector<std::uint8_t> seen(n_ + 1);
    std::vector<std::uint64_t> stabilizer;
    for (std::uint64_t d = 1; d <= n_; ++d) {
      if (n_ % d != 0) continue;
      const std::uint64_t m = n_ / d;
      stabilizer.clear();
      for (std::uint64_t u : units_) {
        if (u % m == 1 % m) stabilizer.push_back(u);
      }
      if (n_ == 1) stabilizer.push_back(1);
      std::fill(seen.begin(), seen.end(), 0);
      for (std::uint64_t t = 1; t <= n_; ++t) {
        if (seen[t] || std::gcd(d, t) != 1) continue;
        for (std::uint64_t u : stabilizer) seen[scaled_residue(u, t, n_)] = 1;
        const Triple rep{n_, d, t};
        const ConditionReport report = check_condition(rep, units_, ScanMode::early_exit);
        if (!report.holds && recording_ != Recording::all) continue;
        for (const Triple& member : orbit_with_units(rep, units_)) {
          if (report.holds) {
            accept(member);
          } else {
            // Witnesses are not orbit-invariant; recompute per member.
            const auto own = member == rep ? report : check_condition(member, units_, ScanMode::early_exit);
            result_.records.push_back({member, false, own.witness, classify_families(member)});
          }
        }
      }
    }
  }

  void accept(const Triple& triple) {
    ++result_.count;
    const FamilySet families = classify_families(triple);
    if (!families.has_algebraic()) {
      if (n_ > kSmallNThreshold) {
        result_.violations.push_back(
            {triple, check_condition(triple, units_, ScanMode::full_scan), families, violation_pattern(triple)});
      } else {
        result_.small_n_exceptions.push_back(triple);
      }
    }
    if (recording_ != Recording::none) result_.records.push_back({triple, true, std::nullopt, families});
  }

  std::uint64_t n_;
  Recording recording_;
  std::vector<std::uint64_t> units_;
  ModulusResult result_;
};

}  // namespace

VerificationReport verify_range(std::uint64_t n_from, std::uint64_t n_to, const VerifyOptions& options) {
  if (n_from == 0) throw DomainError("verify_range: n_from must be at least 1");
  if (n_from > n_to) throw DomainError("verify_range: empty range");
  if (n_to > kMaxVerifyN) {
    throw CapabilityError("verify_range: n_to = " + std::to_string(n_to) + " exceeds the cap " +
                          std::to_string(kMaxVerifyN));
  }
  const auto start = std::chrono::steady_clock::now();
  const std::size_t count = n_to - n_from + 1;
  std::vector<ModulusResult> per_n(count);

  std::mutex progress_mutex;
  std::uint64_t finished = 0;
  // Largest moduli first: they dominate the cost, so this balances workers.
  parallel_for(count, std::max(1u, options.workers), [&](std::size_t i) {
    const std::size_t slot = count - 1 - i;
    per_n[slot] = ModulusScan(n_from + slot, options.recording).run(options.use_orbits);
    if (options.progress) {
      std::lock_guard lock(progress_mutex);
      options.progress(++finished, count);
    }
  });

  VerificationReport report;
  report.n_from = n_from;
  report.n_to = n_to;
  report.use_orbits = options.use_orbits;
  report.counts.reserve(count);
  for (auto& r : per_n) {
    report.counts.push_back(r.count);
    std::move(r.violations.begin(), r.violations.end(), std::back_inserter(report.violations));
    std::move(r.small_n_exceptions.begin(), r.small_n_exceptions.end(), std::back_inserter(report.small_n_exceptions));
    std::move(r.records.begin(), r.records.end(), std::back_inserter(report.records));
  }
  report.elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return report;
}

std::vector<Triple> enumerate_satisfying(std::uint64_t n) {
  if (n == 0) throw DomainError("enumerate_satisfying: n must be positive");
  if (n > kMaxEnumerateN) {
    throw CapabilityError("enumerate_satisfying: n = " + std::to_string(n) + " exceeds " +
                          std::to_string(kMaxEnumerateN));
  }
  const auto u = arith::units(n);
  std::vector<Triple> out;
  // The condition is symmetric in s and t: scan s <= t and mirror.
  for (std::uint64_t s = 1; s <= n; ++s) {
    for (std::uint64_t t = s; t <= n; ++t) {
      if (std::gcd(std::gcd(n, s), t) != 1) continue;
      if (!check_condition({n, s, t}, u, ScanMode::early_exit).holds) continue;
      out.push_back({n, s, t});
      if (s != t) out.push_back({n, t, s});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace trilat::lattice
