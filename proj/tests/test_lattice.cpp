#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "trilat/arith.hpp"
#include "trilat/errors.hpp"
#include "trilat/lattice.hpp"

using namespace trilat;
using namespace trilat::lattice;

namespace {

struct NaiveResult {
  bool holds = true;
  std::uint64_t witness = 0;
};

// Every a in [1, n) with gcd(a, n) = 1, ascending; first failure wins.
NaiveResult naive_check(std::uint64_t n, std::uint64_t s, std::uint64_t t) {
  for (std::uint64_t a = 1; a < n; ++a) {
    if (std::gcd(a, n) != 1) continue;
    const std::uint64_t sum = (a * s) % n + (a * t) % n;
    if (!(n < 2 * sum && 2 * sum < 3 * n)) return {false, a};
  }
  return {};
}

bool naive_in_family(std::uint64_t n, std::uint64_t s, std::uint64_t t) {
  const std::uint64_t diff = s > t ? s - t : t - s;
  return s + t == n || s + 2 * t == n || 2 * s + t == n || (n % 2 == 0 && 2 * diff == n);
}

std::vector<Triple> triples_of(std::uint64_t n) {
  std::vector<Triple> out;
  for (std::uint64_t s = 1; s <= n; ++s) {
    for (std::uint64_t t = 1; t <= n; ++t) {
      if (std::gcd(std::gcd(n, s), t) == 1) out.push_back({n, s, t});
    }
  }
  return out;
}

std::uint64_t image(std::uint64_t u, std::uint64_t x, std::uint64_t n) {
  const std::uint64_t r = (u * x) % n;
  return r == 0 ? n : r;
}

}  // namespace

TEST_CASE("check_condition examples") {
  const auto r5 = check_condition(make_triple(5, 1, 4), ScanMode::full_scan);
  CHECK(r5.holds);
  CHECK_FALSE(r5.witness);
  CHECK(*r5.min_sum == 5);
  CHECK(*r5.max_sum == 5);

  const auto r12 = check_condition(make_triple(12, 1, 1), ScanMode::early_exit);
  CHECK_FALSE(r12.holds);
  CHECK(*r12.witness == 1);
  CHECK(*r12.witness_sum == 2);

  const auto r8 = check_condition(make_triple(8, 1, 5), ScanMode::full_scan);
  CHECK(r8.holds);
  CHECK(*r8.min_sum == 6);
  CHECK(*r8.max_sum == 10);

  const auto r1 = check_condition(make_triple(1, 1, 1), ScanMode::full_scan);
  CHECK(r1.holds);
}

TEST_CASE("check_condition errors") {
  CHECK_THROWS_AS(check_condition(Triple{0, 1, 1}, ScanMode::early_exit), DomainError);
  CHECK_THROWS_AS(make_triple(0, 1, 1), DomainError);
  CHECK_THROWS_AS(make_triple(6, 0, 1), DomainError);
  CHECK_THROWS_AS(make_triple(6, 7, 1), DomainError);
  CHECK_THROWS_AS(make_triple(6, 2, 4), DomainError);
  CHECK(is_valid_triple({6, 6, 1}));
  CHECK_FALSE(is_valid_triple({6, 3, 3}));
}

TEST_CASE("check_condition agrees with the naive scan for n <= 60") {
  for (std::uint64_t n = 1; n <= 60; ++n) {
    for (const auto& tr : triples_of(n)) {
      const auto early = check_condition(tr, ScanMode::early_exit);
      const auto full = check_condition(tr, ScanMode::full_scan);
      const auto naive = naive_check(tr.n, tr.s, tr.t);
      REQUIRE(early.holds == naive.holds);
      REQUIRE(full.holds == naive.holds);
      REQUIRE(early.witness == full.witness);
      if (!naive.holds) REQUIRE(*early.witness == naive.witness);
    }
  }
}

TEST_CASE("moduli near 2^40") {
  const std::uint64_t n = (std::uint64_t{1} << 40) - 87;
  const std::uint64_t half = (n + 1) / 2;
  const Triple tr{n, half, half + 1'000'000};
  // a = 1: sum n + 10^6 + 1 lies in (n/2, 3n/2); a = 2: sum 1 + 2000001 is far too small.
  const auto r = check_condition(tr, ScanMode::early_exit);
  CHECK_FALSE(r.holds);
  CHECK(*r.witness == 2);
  CHECK(*r.witness_sum == 2'000'002);
  CHECK_THROWS_AS(check_condition(Triple{arith::kMaxInput + 1, 1, 1}, ScanMode::early_exit), CapabilityError);
}

TEST_CASE("classify_families examples") {
  const auto f5 = classify_families({5, 1, 4});
  CHECK(f5.contains(Family::small_n));
  CHECK(f5.contains(Family::sum));
  CHECK(f5.members() == std::vector<Family>{Family::small_n, Family::sum});

  const auto f100 = classify_families({100, 49, 51});
  CHECK(f100.members() == std::vector<Family>{Family::sum});

  const auto f200 = classify_families({200, 30, 130});
  CHECK(f200.members() == std::vector<Family>{Family::half_diff});
  CHECK(f200.has_algebraic());

  CHECK(classify_families({79, 2, 78}).empty());
  CHECK(classify_families({9, 1, 4}).members() == std::vector<Family>{Family::small_n, Family::s_plus_2t});
  CHECK(classify_families({9, 4, 1}).members() == std::vector<Family>{Family::small_n, Family::two_s_plus_t});
  CHECK(to_string(Family::two_s_plus_t) == "TWO_S_PLUS_T");
}

TEST_CASE("classify_families matches the naive family predicate") {
  for (std::uint64_t n = 1; n <= 120; ++n) {
    for (const auto& tr : triples_of(n)) {
      const auto fam = classify_families(tr);
      REQUIRE(fam.has_algebraic() == naive_in_family(tr.n, tr.s, tr.t));
      REQUIRE(fam.contains(Family::small_n) == (n <= kSmallNThreshold));
    }
  }
}

TEST_CASE("violation_pattern") {
  CHECK(violation_pattern({79, 2, 78}) == ViolationPattern::congruent_family);
  CHECK(violation_pattern({80, 1, 40}) == ViolationPattern::half_modulus);
  CHECK(violation_pattern({80, 1, 3}) == ViolationPattern::other);
}

TEST_CASE("orbit examples") {
  CHECK(orbit({5, 1, 4}) == std::vector<Triple>{{5, 1, 4}, {5, 2, 3}, {5, 3, 2}, {5, 4, 1}});
  CHECK(orbit({1, 1, 1}) == std::vector<Triple>{{1, 1, 1}});
  CHECK(orbit({6, 3, 2}) == std::vector<Triple>{{6, 3, 2}, {6, 3, 4}});
  CHECK(orbit_representative({5, 3, 2}) == Triple{5, 1, 4});
  CHECK(orbit_representative({6, 3, 4}) == Triple{6, 3, 2});
}

TEST_CASE("orbit matches direct multiplication by units") {
  for (std::uint64_t n = 2; n <= 40; ++n) {
    for (const auto& tr : triples_of(n)) {
      std::set<Triple> expect;
      for (std::uint64_t u = 1; u < n; ++u) {
        if (std::gcd(u, n) == 1) expect.insert({n, image(u, tr.s, n), image(u, tr.t, n)});
      }
      const auto got = orbit(tr);
      REQUIRE(std::vector<Triple>(expect.begin(), expect.end()) == got);
      REQUIRE(orbit_representative(tr) == got.front());
    }
  }
}

TEST_CASE("swap symmetry, orbit invariance and the a = 1 filter for n <= 150") {
  for (std::uint64_t n = 2; n <= 150; ++n) {
    const auto u = arith::units(n);
    // holds[s * (n + 1) + t]: -1 for pairs with gcd(n, s, t) > 1.
    std::vector<int> holds((n + 1) * (n + 1), -1);
    const auto at = [&](std::uint64_t s, std::uint64_t t) -> int& { return holds[s * (n + 1) + t]; };
    const auto all = triples_of(n);
    for (const auto& tr : all) at(tr.s, tr.t) = check_condition(tr, u, ScanMode::early_exit).holds;
    for (const auto& tr : all) {
      const int h = at(tr.s, tr.t);
      REQUIRE(at(tr.t, tr.s) == h);
      if (h) {
        REQUIRE(n < 2 * (tr.s + tr.t));
        REQUIRE(2 * (tr.s + tr.t) < 3 * n);
      }
      for (std::uint64_t a : u) REQUIRE(at(image(a, tr.s, n), image(a, tr.t, n)) == h);
    }
  }
}

TEST_CASE("reflection identity: min_sum + max_sum = 2n when s, t < n") {
  for (std::uint64_t n = 3; n <= 80; ++n) {
    for (const auto& tr : triples_of(n)) {
      if (tr.s == n || tr.t == n) continue;
      const auto r = check_condition(tr, ScanMode::full_scan);
      REQUIRE(*r.min_sum + *r.max_sum == 2 * n);
    }
  }
}

TEST_CASE("verify_range on tiny ranges") {
  const auto r5 = verify_range(5, 5);
  // Brute force over the 25 pairs (s, t) on n = 5.
  std::uint64_t expect = 0;
  for (const auto& tr : triples_of(5)) expect += naive_check(5, tr.s, tr.t).holds;
  REQUIRE(r5.counts.size() == 1);
  CHECK(r5.counts[0] == expect);
  CHECK(r5.counts[0] >= 4);
  CHECK(r5.violations.empty());

  const auto r1 = verify_range(1, 1);
  CHECK(r1.counts == std::vector<std::uint64_t>{1});
  CHECK(r1.violations.empty());
  CHECK(r1.small_n_exceptions.size() == 1);

  CHECK_THROWS_AS(verify_range(0, 5), DomainError);
  CHECK_THROWS_AS(verify_range(6, 5), DomainError);
  CHECK_THROWS_AS(verify_range(1, kMaxVerifyN + 1), CapabilityError);
}

TEST_CASE("orbit-reduced and direct verification agree triple for triple") {
  const auto direct = verify_range(1, 90, {.use_orbits = false, .recording = Recording::all});
  const auto orbits = verify_range(1, 90, {.use_orbits = true, .recording = Recording::all});
  REQUIRE(direct.records.size() == orbits.records.size());
  for (std::size_t i = 0; i < direct.records.size(); ++i) {
    const auto& d = direct.records[i];
    const auto& o = orbits.records[i];
    REQUIRE(d.triple == o.triple);
    REQUIRE(d.holds == o.holds);
    REQUIRE(d.witness == o.witness);
    REQUIRE(d.families == o.families);
    const auto naive = naive_check(d.triple.n, d.triple.s, d.triple.t);
    REQUIRE(d.holds == naive.holds);
    if (!naive.holds) REQUIRE(*d.witness == naive.witness);
  }
  CHECK(direct.counts == orbits.counts);
  CHECK(direct.violations.size() == orbits.violations.size());
  CHECK(direct.small_n_exceptions == orbits.small_n_exceptions);
}

TEST_CASE("79..100: every unclassified satisfying triple has a recognised shape") {
  // Independent listing: satisfying triples outside all integer family equations.
  std::vector<Triple> expect;
  for (std::uint64_t n = 79; n <= 100; ++n) {
    for (const auto& tr : triples_of(n)) {
      if (naive_check(n, tr.s, tr.t).holds && !naive_in_family(n, tr.s, tr.t)) expect.push_back(tr);
    }
  }
  const auto report = verify_range(79, 100, {.use_orbits = true, .workers = 3});
  std::vector<Triple> got;
  for (const auto& v : report.violations) {
    got.push_back(v.triple);
    CHECK(v.pattern != ViolationPattern::other);
    CHECK(v.families.empty());
    CHECK(v.report.holds);
  }
  CHECK(got == expect);
  CHECK_FALSE(expect.empty());
}

TEST_CASE("worker count does not change the report") {
  const auto one = verify_range(60, 110, {.use_orbits = true, .workers = 1, .recording = Recording::satisfying});
  const auto four = verify_range(60, 110, {.use_orbits = true, .workers = 4, .recording = Recording::satisfying});
  CHECK(one.counts == four.counts);
  CHECK(one.small_n_exceptions == four.small_n_exceptions);
  REQUIRE(one.records.size() == four.records.size());
  for (std::size_t i = 0; i < one.records.size(); ++i) REQUIRE(one.records[i].triple == four.records[i].triple);
  REQUIRE(one.violations.size() == four.violations.size());
  for (std::size_t i = 0; i < one.violations.size(); ++i) {
    REQUIRE(one.violations[i].triple == four.violations[i].triple);
  }
}

TEST_CASE("enumerate_satisfying") {
  CHECK(enumerate_satisfying(2) == std::vector<Triple>{{2, 1, 1}});
  const auto e4 = enumerate_satisfying(4);
  CHECK(std::find(e4.begin(), e4.end(), Triple{4, 1, 3}) != e4.end());
  CHECK(std::find(e4.begin(), e4.end(), Triple{4, 3, 1}) != e4.end());

  const auto e79 = enumerate_satisfying(79);
  const auto report = verify_range(79, 79, {.recording = Recording::satisfying});
  REQUIRE(e79.size() == report.records.size());
  for (std::size_t i = 0; i < e79.size(); ++i) REQUIRE(e79[i] == report.records[i].triple);
  CHECK(std::is_sorted(e79.begin(), e79.end()));
  CHECK_THROWS_AS(enumerate_satisfying(0), DomainError);
  CHECK_THROWS_AS(enumerate_satisfying(kMaxEnumerateN + 1), CapabilityError);
}
