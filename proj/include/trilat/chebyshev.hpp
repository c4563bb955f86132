#pragma once

// Chebyshev's theta in arithmetic progressions,
//
//   theta(x, q, a) = sum of log p over primes p <= x with p = a (mod q),
//
// accumulated exactly in 60-fractional-bit fixed point, and the sweeps that
// check the explicit lower bound and the sqrt(x) envelope for q <= 10.

#include <cstdint>
#include <string_view>
#include <vector>

#include "trilat/arith.hpp"
#include "trilat/fixed.hpp"

namespace trilat::chebyshev {

inline constexpr unsigned kMaxModulus = 10;
/// Lower-bound sweeps report violations from here on.
inline constexpr std::uint64_t kLowerBoundFrom = 89;
/// Envelope sweeps start here.
inline constexpr std::uint64_t kEnvelopeFrom = 619;
/// Envelope constant 2.072 as a ratio of integers.
inline constexpr std::uint64_t kEnvelopeNumerator = 2072;
inline constexpr std::uint64_t kEnvelopeDenominator = 1000;
inline constexpr std::uint64_t kMaxEnvelopeX = 1'000'000;
/// Margin-rule escalation recomputes theta with 100 fractional bits, which
/// must fit 128 bits: theta(x) < 2^27 suffices.
inline constexpr std::uint64_t kMaxSweepX = 100'000'000;

unsigned euler_phi(unsigned q);

/// Residues a in [0, q) with gcd(a, q) = 1; {0} for q = 1.
std::vector<unsigned> coprime_residues(unsigned q);

/// theta(x, q, a). Throws DomainError for q outside [1, 10] or a >= q and
/// CapabilityError when x exceeds the table.
Fixed60 theta(std::uint64_t x, unsigned q, unsigned a, const arith::PrimeTable& table);

/// Same sum with 100-fractional-bit logarithms, for margin escalation.
Fixed100 theta_wide(std::uint64_t x, unsigned q, unsigned a, const arith::PrimeTable& table);

/// Running theta(x, q, a) for every residue a mod q as x advances.
class ThetaAccumulator {
 public:
  ThetaAccumulator(unsigned q, const arith::PrimeTable& table);

  /// Adds primes in (x(), x_new]. x_new must not decrease.
  void advance_to(std::uint64_t x_new);

  unsigned q() const { return q_; }
  std::uint64_t x() const { return x_; }
  Fixed60 sum(unsigned a) const { return sums_[a]; }
  const std::vector<Fixed60>& sums() const { return sums_; }

 private:
  unsigned q_;
  const arith::PrimeTable* table_;
  std::size_t next_ = 0;
  std::uint64_t x_ = 0;
  std::vector<Fixed60> sums_;
};

/// Raised whenever the two sides of a check are within 2^-margin_bits
/// (default 2^-20) of each other in 60-bit fixed point; the verdict then
/// comes from 100-bit logs.
struct MarginEvent {
  enum class Check { lower_bound, envelope };
  Check check;
  unsigned q;
  unsigned a;
  std::uint64_t x;
  bool holds_after_escalation;
};

std::string_view to_string(MarginEvent::Check check);

struct LowerBoundViolation {
  std::uint64_t x;
  Fixed60 theta;
  std::uint64_t phi;  // lhs of the failed check is 2 phi theta, rhs is x
};

struct EnvelopeViolation {
  std::uint64_t x;
  Fixed60 theta;
  long double deviation;  // |theta - x / phi|
  long double envelope;   // 2.072 sqrt(x)
};

struct ResidueReport {
  unsigned a = 0;
  /// Integer x >= 89 with 2 phi(q) theta(x, q, a) < x.
  std::vector<LowerBoundViolation> lower_bound_violations;
  /// Least X with the lower bound holding on all of [X, x_max].
  std::uint64_t minimal_valid_x = 2;
  /// Integer x in [619, min(x_max, 10^6)] where the envelope fails.
  std::vector<EnvelopeViolation> envelope_violations;
  Fixed60 theta_at_x_max;
};

struct ProgressionReport {
  unsigned q = 1;
  std::uint64_t x_max = 0;
  bool envelope_checked = false;
  std::vector<ResidueReport> residues;  // ascending a, coprime residues only
  std::vector<MarginEvent> margin_events;

  std::size_t violation_count() const;
};

struct SweepOptions {
  bool lower_bound = true;
  bool envelope = true;
  unsigned workers = 1;
  /// Sides closer than 2^-margin_bits escalate to 100-bit logs.
  int margin_bits = 20;
};

/// One incremental pass over x = 2..x_max per coprime residue of q, each
/// residue on its own worker.
ProgressionReport sweep_progression(unsigned q, std::uint64_t x_max, const arith::PrimeTable& table,
                                    const SweepOptions& options = {});

/// Lower-bound sweep only.
ProgressionReport verify_lower_bound(unsigned q, std::uint64_t x_max, const arith::PrimeTable& table);

/// Envelope sweep only; x_max <= min(table.limit(), 10^6).
ProgressionReport verify_envelope(unsigned q, std::uint64_t x_max, const arith::PrimeTable& table);

/// theta(x, 1, 0) - [sum over coprime a of theta(x, q, a) + sum of log p
/// over primes p <= x dividing q], as a signed raw fixed-point difference.
__int128 conservation_defect(unsigned q, std::uint64_t x, const arith::PrimeTable& table);

}  // namespace trilat::chebyshev
