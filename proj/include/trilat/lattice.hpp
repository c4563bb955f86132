#pragma once

// The residue-sum condition on triples (n, s, t):
//
//   for every unit a mod n:   n/2 < (a s mod n) + (a t mod n) < 3n/2,
//
// evaluated in the integer form n < 2 * sum < 3n, together with the
// exceptional families that are allowed to satisfy it and an exhaustive
// range verifier.

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace trilat::lattice {

/// Moduli up to this value fall under the catch-all family.
inline constexpr std::uint64_t kSmallNThreshold = 78;
/// Largest n accepted by verify_range.
inline constexpr std::uint64_t kMaxVerifyN = std::uint64_t{1} << 20;
/// Largest n accepted by enumerate_satisfying.
inline constexpr std::uint64_t kMaxEnumerateN = 10'000;

struct Triple {
  std::uint64_t n = 1;
  std::uint64_t s = 1;
  std::uint64_t t = 1;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Checks 1 <= s, t <= n and gcd(n, s, t) = 1; throws DomainError otherwise.
Triple make_triple(std::uint64_t n, std::uint64_t s, std::uint64_t t);
bool is_valid_triple(const Triple& triple);

enum class ScanMode { early_exit, full_scan };

struct ConditionReport {
  bool holds = true;
  /// Smallest violating unit, absent when the condition holds.
  std::optional<std::uint64_t> witness;
  /// (a s mod n) + (a t mod n) at the witness.
  std::optional<std::uint64_t> witness_sum;
  /// Extremal sums over all units; populated by a completed full scan
  /// (and by an early-exit scan that ran to completion).
  std::optional<std::uint64_t> min_sum;
  std::optional<std::uint64_t> max_sum;
};

ConditionReport check_condition(const Triple& triple, ScanMode mode);

/// Same as above with the unit list of triple.n supplied by the caller.
ConditionReport check_condition(const Triple& triple, std::span<const std::uint64_t> units, ScanMode mode);

enum class Family : std::uint8_t { small_n, sum, s_plus_2t, two_s_plus_t, half_diff };

std::string_view to_string(Family family);

inline constexpr Family kAllFamilies[] = {Family::small_n, Family::sum, Family::s_plus_2t, Family::two_s_plus_t,
                                          Family::half_diff};

class FamilySet {
 public:
  constexpr FamilySet() = default;

  constexpr void insert(Family f) { bits_ |= bit(f); }
  constexpr bool contains(Family f) const { return (bits_ & bit(f)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  /// True when some family other than the small-n catch-all applies.
  constexpr bool has_algebraic() const { return (bits_ & ~bit(Family::small_n)) != 0; }
  std::vector<Family> members() const;

  friend constexpr bool operator==(FamilySet, FamilySet) = default;

 private:
  static constexpr std::uint8_t bit(Family f) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(f)); }
  std::uint8_t bits_ = 0;
};

FamilySet classify_families(const Triple& triple);

/// Shape of a satisfying triple that lies in no algebraic family: either a
/// family equation holds modulo n but not as an integer equation (e.g.
/// s + 2t = 2n), or n is even and s or t equals n/2. Anything else is
/// `other`.
enum class ViolationPattern { congruent_family, half_modulus, other };

ViolationPattern violation_pattern(const Triple& triple);
std::string_view to_string(ViolationPattern pattern);

/// {(n, u s mod n, u t mod n) : u a unit}, residue 0 written as n, sorted.
/// For n = 1 the orbit is the input itself.
std::vector<Triple> orbit(const Triple& triple);

/// Lexicographically smallest (s, t) in the unit orbit.
Triple orbit_representative(const Triple& triple);

/// One line of a per-triple listing (CSV output, oracle comparisons).
struct TripleRecord {
  Triple triple;
  bool holds = false;
  std::optional<std::uint64_t> witness;
  FamilySet families;
};

struct Violation {
  Triple triple;
  ConditionReport report;  // full scan: min_sum and max_sum populated
  FamilySet families;
  ViolationPattern pattern = ViolationPattern::other;
};

enum class Recording {
  none,        // counts, violations and small-n exceptions only
  satisfying,  // plus a TripleRecord per condition-satisfying triple
  all,         // plus a TripleRecord per triple, with witnesses
};

struct VerifyOptions {
  bool use_orbits = false;
  unsigned workers = 1;
  Recording recording = Recording::none;
  /// Called after each modulus completes with (finished, total); calls are
  /// serialized but may come from any worker thread.
  std::function<void(std::uint64_t, std::uint64_t)> progress;
};

struct VerificationReport {
  std::uint64_t n_from = 0;
  std::uint64_t n_to = 0;
  bool use_orbits = false;
  std::vector<Violation> violations;
  /// Satisfying triples with n <= 78 that lie in no algebraic family.
  std::vector<Triple> small_n_exceptions;
  /// counts[i]: number of condition-satisfying triples with n = n_from + i.
  std::vector<std::uint64_t> counts;
  /// Per-triple records as requested by VerifyOptions::recording, ascending.
  std::vector<TripleRecord> records;
  std::chrono::milliseconds elapsed{0};

  std::uint64_t total_satisfying() const;
};

/// Exhaustive check over n_from <= n <= n_to. Output is independent of
/// options.workers. Throws DomainError for an empty or zero-based range and
/// CapabilityError when n_to exceeds kMaxVerifyN.
VerificationReport verify_range(std::uint64_t n_from, std::uint64_t n_to, const VerifyOptions& options = {});

/// Every triple on n satisfying the condition, ascending by (s, t).
std::vector<Triple> enumerate_satisfying(std::uint64_t n);

}  // namespace trilat::lattice
