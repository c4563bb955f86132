#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "trilat/chebyshev.hpp"
#include "trilat/errors.hpp"

using namespace trilat;
using namespace trilat::chebyshev;

namespace {

const arith::PrimeTable& table() {
  static const arith::PrimeTable t = arith::sieve(1'000'000);
  return t;
}

bool is_prime_by_trial(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

// theta(x, q, a) for every x <= x_max, from trial division and long double logs.
std::vector<long double> oracle_theta(unsigned q, unsigned a, std::uint64_t x_max) {
  std::vector<long double> out(x_max + 1, 0.0L);
  for (std::uint64_t x = 2; x <= x_max; ++x) {
    out[x] = out[x - 1];
    if (x % q == a && is_prime_by_trial(x)) out[x] += std::log(static_cast<long double>(x));
  }
  return out;
}

}  // namespace

TEST_CASE("theta examples") {
  const long double tol = 1e-15L;
  CHECK(std::fabs(theta(10, 1, 0, table()).to_long_double() - std::log(210.0L)) < tol);
  CHECK(std::fabs(theta(2, 3, 2, table()).to_long_double() - std::log(2.0L)) < tol);
  CHECK(std::fabs(theta(10, 4, 3, table()).to_long_double() - std::log(21.0L)) < tol);
  CHECK(theta(1, 1, 0, table()).raw == 0);
}

TEST_CASE("theta errors") {
  CHECK_THROWS_AS(theta(10, 0, 0, table()), DomainError);
  CHECK_THROWS_AS(theta(10, 11, 1, table()), DomainError);
  CHECK_THROWS_AS(theta(10, 4, 4, table()), DomainError);
  CHECK_THROWS_AS(theta(1'000'001, 1, 0, table()), CapabilityError);
  CHECK_THROWS_AS(sweep_progression(3, 1'000'001, table()), CapabilityError);
  CHECK_THROWS_AS(verify_envelope(3, 1'000'001, arith::sieve(2'000'000)), CapabilityError);
  CHECK_THROWS_AS(ThetaAccumulator(12, table()), DomainError);
}

TEST_CASE("euler_phi and coprime residues") {
  CHECK(euler_phi(1) == 1);
  CHECK(euler_phi(10) == 4);
  CHECK(coprime_residues(1) == std::vector<unsigned>{0});
  CHECK(coprime_residues(10) == std::vector<unsigned>{1, 3, 7, 9});
}

TEST_CASE("theta agrees with a long double oracle and is monotone") {
  for (unsigned q : {1u, 4u, 7u, 10u}) {
    for (unsigned a : coprime_residues(q)) {
      const auto oracle = oracle_theta(q, a, 5000);
      ThetaAccumulator acc(q, table());
      Fixed60 prev;
      for (std::uint64_t x = 2; x <= 5000; ++x) {
        acc.advance_to(x);
        const Fixed60 th = acc.sum(a);
        REQUIRE(std::fabs(th.to_long_double() - oracle[x]) < 1e-13L);
        REQUIRE(th >= prev);
        const bool jumps = x % q == a && is_prime_by_trial(x);
        REQUIRE((th == prev) == !jumps);
        prev = th;
      }
      REQUIRE(acc.sum(a) == theta(5000, q, a, table()));
    }
  }
  ThetaAccumulator acc(3, table());
  acc.advance_to(100);
  CHECK_THROWS_AS(acc.advance_to(99), DomainError);
}

TEST_CASE("conservation is exact for q <= 10 and x <= 10^4") {
  for (unsigned q = 1; q <= 10; ++q) {
    for (std::uint64_t x = 1; x <= 10'000; x += (x < 200 ? 1 : 37)) REQUIRE(conservation_defect(q, x, table()) == 0);
    REQUIRE(conservation_defect(q, 1'000'000, table()) == 0);
  }
}

TEST_CASE("lower bound thresholds match an independent oracle") {
  // Least X with 2 phi(q) theta(x, q, a) >= x on [X, 10^6], from a double
  // precision sweep of an independently generated prime list.
  const std::map<std::pair<unsigned, unsigned>, std::uint64_t> frozen{
      {{1, 0}, 5},   {{2, 1}, 11},  {{3, 1}, 31},  {{3, 2}, 11},  {{4, 1}, 13},  {{4, 3}, 7},   {{5, 1}, 31},
      {{5, 2}, 7},   {{5, 3}, 13},  {{5, 4}, 59},  {{6, 1}, 31},  {{6, 5}, 11},  {{7, 1}, 43},  {{7, 2}, 23},
      {{7, 3}, 17},  {{7, 4}, 53},  {{7, 5}, 5},   {{7, 6}, 83},  {{8, 1}, 89},  {{8, 3}, 11},  {{8, 5}, 5},
      {{8, 7}, 23},  {{9, 1}, 37},  {{9, 2}, 11},  {{9, 4}, 13},  {{9, 5}, 23},  {{9, 7}, 43},  {{9, 8}, 53},
      {{10, 1}, 31}, {{10, 3}, 13}, {{10, 7}, 17}, {{10, 9}, 59}};

  for (unsigned q = 1; q <= 10; ++q) {
    const auto report = verify_lower_bound(q, 100'000, table());
    CHECK(report.margin_events.empty());
    CHECK_FALSE(report.envelope_checked);
    for (const auto& r : report.residues) {
      CAPTURE(q);
      CAPTURE(r.a);
      CHECK(r.lower_bound_violations.empty());
      CHECK(r.envelope_violations.empty());
      CHECK(r.minimal_valid_x == frozen.at({q, r.a}));

      // Same threshold from the long double oracle on [2, 2000]; every
      // threshold lies far below 2000.
      const auto oracle = oracle_theta(q, r.a, 2000);
      std::uint64_t last_fail = 1;
      for (std::uint64_t x = 2; x <= 2000; ++x) {
        if (2.0L * euler_phi(q) * oracle[x] < static_cast<long double>(x)) last_fail = x;
      }
      CHECK(last_fail + 1 == r.minimal_valid_x);
    }
  }
}

TEST_CASE("lower bound reports failures below 89 only through the threshold") {
  // q = 8, a = 1: theta(88, 8, 1) = log 17 + log 41 + log 73 < 88 / 8.
  const auto report = verify_lower_bound(8, 1000, table());
  const auto& r = report.residues.front();
  CHECK(r.a == 1);
  CHECK(r.lower_bound_violations.empty());
  CHECK(r.minimal_valid_x == 89);
  CHECK(8.0L * theta(88, 8, 1, table()).to_long_double() < 88.0L);
}

TEST_CASE("envelope holds for q = 1 and q = 7 up to 10^5 and at x = 619") {
  for (unsigned q : {1u, 7u}) {
    const auto report = verify_envelope(q, 100'000, table());
    CHECK(report.envelope_checked);
    CHECK(report.margin_events.empty());
    CHECK(report.residues.size() == euler_phi(q));
    for (const auto& r : report.residues) CHECK(r.envelope_violations.empty());
  }
  for (unsigned q = 1; q <= 10; ++q) {
    for (unsigned a : coprime_residues(q)) {
      const long double th = theta(619, q, a, table()).to_long_double();
      CHECK(std::fabs(th - 619.0L / euler_phi(q)) < 2.072L * std::sqrt(619.0L));
    }
  }
}

TEST_CASE("forced escalation reaches the same verdicts and logs every check") {
  const auto normal = sweep_progression(5, 700, table());
  const auto forced = sweep_progression(5, 700, table(), {.margin_bits = -60});
  REQUIRE(normal.residues.size() == forced.residues.size());
  for (std::size_t i = 0; i < normal.residues.size(); ++i) {
    CHECK(normal.residues[i].minimal_valid_x == forced.residues[i].minimal_valid_x);
    CHECK(forced.residues[i].lower_bound_violations.empty());
    CHECK(forced.residues[i].envelope_violations.empty());
  }
  // 4 residues; lower bound at x = 2..700, envelope at x = 619..700.
  CHECK(forced.margin_events.size() == 4 * (699 + 82));
  std::size_t disagreements = 0;
  for (const auto& e : forced.margin_events) {
    if (e.check == MarginEvent::Check::envelope) {
      disagreements += !e.holds_after_escalation;
    } else {
      const long double th = theta(e.x, 5, e.a, table()).to_long_double();
      disagreements += e.holds_after_escalation != (8.0L * th >= static_cast<long double>(e.x));
    }
  }
  CHECK(disagreements == 0);
  CHECK(to_string(MarginEvent::Check::envelope) == "envelope");
}

TEST_CASE("sweeps are independent of the worker count") {
  const auto one = sweep_progression(9, 50'000, table(), {.workers = 1});
  const auto four = sweep_progression(9, 50'000, table(), {.workers = 4});
  REQUIRE(one.residues.size() == four.residues.size());
  for (std::size_t i = 0; i < one.residues.size(); ++i) {
    CHECK(one.residues[i].a == four.residues[i].a);
    CHECK(one.residues[i].minimal_valid_x == four.residues[i].minimal_valid_x);
    CHECK(one.residues[i].theta_at_x_max == four.residues[i].theta_at_x_max);
  }
}
