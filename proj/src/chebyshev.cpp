#include "trilat/chebyshev.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "trilat/errors.hpp"
#include "trilat/parallel.hpp"

namespace trilat::chebyshev {

namespace mp = boost::multiprecision;

unsigned euler_phi(unsigned q) {
  if (q == 0) throw DomainError("euler_phi: q must be positive");
  unsigned count = 0;
  for (unsigned a = 1; a <= q; ++a) count += std::gcd(a, q) == 1;
  return count;
}

std::vector<unsigned> coprime_residues(unsigned q) {
  if (q == 1) return {0};
  std::vector<unsigned> out;
  for (unsigned a = 1; a < q; ++a) {
    if (std::gcd(a, q) == 1) out.push_back(a);
  }
  return out;
}

namespace {

void check_progression(unsigned q, unsigned a) {
  if (q < 1 || q > kMaxModulus) throw DomainError("modulus q = " + std::to_string(q) + " outside [1, 10]");
  if (a >= q) throw DomainError("residue a = " + std::to_string(a) + " outside [0, q)");
}

void check_table(std::uint64_t x, const arith::PrimeTable& table) {
  if (x > table.limit()) {
    throw CapabilityError("x = " + std::to_string(x) + " exceeds the prime table limit " +
                          std::to_string(table.limit()));
  }
}

}  // namespace

Fixed60 theta(std::uint64_t x, unsigned q, unsigned a, const arith::PrimeTable& table) {
  check_progression(q, a);
  check_table(x, table);
  const auto primes = table.primes();
  const auto logs = table.logs();
  const std::size_t end = table.count_upto(x);
  Fixed60 sum;
  for (std::size_t i = 0; i < end; ++i) {
    if (primes[i] % q == a) sum += logs[i];
  }
  return sum;
}

Fixed100 theta_wide(std::uint64_t x, unsigned q, unsigned a, const arith::PrimeTable& table) {
  check_progression(q, a);
  check_table(x, table);
  if (x > kMaxSweepX) throw CapabilityError("theta_wide: x exceeds " + std::to_string(kMaxSweepX));
  const auto primes = table.primes();
  const std::size_t end = table.count_upto(x);
  Fixed100 sum;
  for (std::size_t i = 0; i < end; ++i) {
    if (primes[i] % q == a) sum += fixed_log<100>(primes[i]);
  }
  return sum;
}

ThetaAccumulator::ThetaAccumulator(unsigned q, const arith::PrimeTable& table)
    : q_(q), table_(&table), sums_(q) {
  check_progression(q, 0);
}

void ThetaAccumulator::advance_to(std::uint64_t x_new) {
  if (x_new < x_) throw DomainError("ThetaAccumulator: x must not decrease");
  check_table(x_new, *table_);
  const auto primes = table_->primes();
  const auto logs = table_->logs();
  while (next_ < primes.size() && primes[next_] <= x_new) {
    sums_[primes[next_] % q_] += logs[next_];
    ++next_;
  }
  x_ = x_new;
}

std::string_view to_string(MarginEvent::Check check) {
  return check == MarginEvent::Check::lower_bound ? "lower_bound" : "envelope";
}

std::size_t ProgressionReport::violation_count() const {
  std::size_t n = 0;
  for (const auto& r : residues) n += r.lower_bound_violations.size() + r.envelope_violations.size();
  return n;
}

namespace {

//   |theta - x/phi| < 2.072 sqrt(x)
//   <=> 10^6 (phi theta - x)^2 < 2072^2 phi^2 x,
// with deviation_raw = phi theta - x in fixed point, hence the 2^(2 bits).
template <typename Wide>
bool envelope_holds(const Wide& deviation_raw, std::uint64_t phi, std::uint64_t x, int fraction_bits) {
  const Wide lhs = Wide(kEnvelopeDenominator * kEnvelopeDenominator) * deviation_raw * deviation_raw;
  const Wide rhs = (Wide(kEnvelopeNumerator * kEnvelopeNumerator) * phi * phi * x) << (2 * fraction_bits);
  return lhs < rhs;
}

struct ResidueSweep {
  unsigned q;
  unsigned a;
  std::uint64_t phi;
  std::uint64_t x_max;
  const arith::PrimeTable& table;
  const SweepOptions& options;

  ResidueReport report;
  std::vector<MarginEvent> events;

  void run() {
    report.a = a;
    const auto primes = table.primes();
    const auto logs = table.logs();
    const std::uint64_t envelope_to = std::min(x_max, kMaxEnvelopeX);
    const int margin = std::clamp(options.margin_bits, -60, 60);
    const u128 near = u128(1) << (Fixed60::kFractionBits - margin);
    std::uint64_t last_failure = 1;
    std::size_t next = 0;
    Fixed60 th;

    for (std::uint64_t x = 2; x <= x_max; ++x) {
      while (next < primes.size() && primes[next] <= x) {
        if (primes[next] % q == a) th += logs[next];
        ++next;
      }

      if (options.lower_bound) {
        const u128 lhs = th.raw * (2 * phi);
        const u128 rhs = u128(x) << Fixed60::kFractionBits;
        bool holds = lhs >= rhs;
        if ((lhs > rhs ? lhs - rhs : rhs - lhs) < near) holds = escalate_lower(x);
        if (!holds) {
          last_failure = x;
          if (x >= kLowerBoundFrom) report.lower_bound_violations.push_back({x, th, phi});
        }
      }

      if (options.envelope && x >= kEnvelopeFrom && x <= envelope_to) {
        const __int128 dev = static_cast<__int128>(th.raw * phi) - static_cast<__int128>(u128(x) << 60);
        bool holds = envelope_holds<mp::int256_t>(mp::int256_t(dev), phi, x, Fixed60::kFractionBits);
        const long double deviation = std::fabs(static_cast<long double>(dev)) / 1152921504606846976.0L / phi;
        const long double envelope = 2.072L * std::sqrt(static_cast<long double>(x));
        if (std::fabs(envelope - deviation) < std::ldexp(1.0L, -margin)) holds = escalate_envelope(x);
        if (!holds) report.envelope_violations.push_back({x, th, deviation, envelope});
      }
    }
    report.minimal_valid_x = last_failure + 1;
    report.theta_at_x_max = th;
  }

  bool escalate_lower(std::uint64_t x) {
    const Fixed100 wide = theta_wide(x, q, a, table);
    const mp::int512_t lhs = mp::int512_t(static_cast<std::uint64_t>(wide.raw >> 64)) << 64 |
                             mp::int512_t(static_cast<std::uint64_t>(wide.raw));
    const bool holds = lhs * (2 * phi) >= (mp::int512_t(x) << 100);
    events.push_back({MarginEvent::Check::lower_bound, q, a, x, holds});
    return holds;
  }

  bool escalate_envelope(std::uint64_t x) {
    const Fixed100 wide = theta_wide(x, q, a, table);
    const mp::int512_t th = mp::int512_t(static_cast<std::uint64_t>(wide.raw >> 64)) << 64 |
                            mp::int512_t(static_cast<std::uint64_t>(wide.raw));
    const mp::int512_t dev = th * phi - (mp::int512_t(x) << 100);
    const bool holds = envelope_holds<mp::int512_t>(dev, phi, x, 100);
    events.push_back({MarginEvent::Check::envelope, q, a, x, holds});
    return holds;
  }
};

}  // namespace

ProgressionReport sweep_progression(unsigned q, std::uint64_t x_max, const arith::PrimeTable& table,
                                    const SweepOptions& options) {
  check_progression(q, 0);
  check_table(x_max, table);
  if (x_max > kMaxSweepX) throw CapabilityError("sweep: x_max exceeds " + std::to_string(kMaxSweepX));
  if (x_max < 2) throw DomainError("sweep: x_max must be at least 2");

  const std::uint64_t phi = euler_phi(q);
  const auto residues = coprime_residues(q);
  std::vector<ResidueSweep> sweeps;
  sweeps.reserve(residues.size());
  for (unsigned a : residues) sweeps.push_back({q, a, phi, x_max, table, options, {}, {}});
  parallel_for(sweeps.size(), options.workers, [&](std::size_t i) { sweeps[i].run(); });

  ProgressionReport out;
  out.q = q;
  out.x_max = x_max;
  out.envelope_checked = options.envelope;
  for (auto& s : sweeps) {
    out.residues.push_back(std::move(s.report));
    out.margin_events.insert(out.margin_events.end(), s.events.begin(), s.events.end());
  }
  return out;
}

ProgressionReport verify_lower_bound(unsigned q, std::uint64_t x_max, const arith::PrimeTable& table) {
  return sweep_progression(q, x_max, table, {.lower_bound = true, .envelope = false});
}

ProgressionReport verify_envelope(unsigned q, std::uint64_t x_max, const arith::PrimeTable& table) {
  if (x_max > kMaxEnvelopeX) {
    throw CapabilityError("verify_envelope: x_max exceeds " + std::to_string(kMaxEnvelopeX));
  }
  return sweep_progression(q, x_max, table, {.lower_bound = false, .envelope = true});
}

__int128 conservation_defect(unsigned q, std::uint64_t x, const arith::PrimeTable& table) {
  check_progression(q, 0);
  ThetaAccumulator all(1, table);
  ThetaAccumulator split(q, table);
  all.advance_to(x);
  split.advance_to(x);
  Fixed60 parts;
  for (unsigned a : coprime_residues(q)) parts += split.sum(a);
  const auto primes = table.primes();
  const auto logs = table.logs();
  for (std::size_t i = 0; i < primes.size() && primes[i] <= x; ++i) {
    if (q % primes[i] == 0) parts += logs[i];
  }
  return static_cast<__int128>(all.sum(0).raw) - static_cast<__int128>(parts.raw);
}

}  // namespace trilat::chebyshev
