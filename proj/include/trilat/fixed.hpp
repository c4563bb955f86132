#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace trilat {

using u128 = unsigned __int128;

/// Unsigned binary fixed-point number with `FractionBits` fractional bits,
/// stored in 128 bits. Addition is exact, so sums of table entries are
/// bit-for-bit reproducible regardless of platform or summation order.
template <int FractionBits>
struct Fixed {
  static_assert(FractionBits > 0 && FractionBits < 120);
  static constexpr int kFractionBits = FractionBits;

  u128 raw = 0;

  static constexpr Fixed from_integer(std::uint64_t v) { return Fixed{u128(v) << FractionBits}; }

  constexpr Fixed& operator+=(Fixed o) {
    raw += o.raw;
    return *this;
  }
  constexpr Fixed& operator-=(Fixed o) {
    raw -= o.raw;
    return *this;
  }
  friend constexpr Fixed operator+(Fixed a, Fixed b) { return a += b; }
  friend constexpr Fixed operator-(Fixed a, Fixed b) { return a -= b; }
  friend constexpr auto operator<=>(Fixed, Fixed) = default;

  long double to_long_double() const {
    const auto hi = static_cast<std::uint64_t>(raw >> 64);
    const auto lo = static_cast<std::uint64_t>(raw);
    long double v = static_cast<long double>(hi) * 18446744073709551616.0L + static_cast<long double>(lo);
    for (int b = FractionBits; b > 0;) {
      const int step = b > 60 ? 60 : b;
      v /= static_cast<long double>(std::uint64_t{1} << step);
      b -= step;
    }
    return v;
  }
  double to_double() const { return static_cast<double>(to_long_double()); }

  // Raw value as "0x" followed by 32 lowercase hex digits.
  std::string hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out = "0x";
    for (int shift = 124; shift >= 0; shift -= 4) out += kDigits[static_cast<int>((raw >> shift) & 0xf)];
    return out;
  }
};

using Fixed60 = Fixed<60>;
using Fixed100 = Fixed<100>;

/// Natural logarithm of `v` rounded to nearest at the given number of
/// fractional bits. Computed with correctly rounded multiprecision
/// arithmetic, so every platform produces the same bits.
u128 fixed_log_raw(std::uint64_t v, int fraction_bits);

template <int FractionBits>
Fixed<FractionBits> fixed_log(std::uint64_t v) {
  return Fixed<FractionBits>{fixed_log_raw(v, FractionBits)};
}

}  // namespace trilat
