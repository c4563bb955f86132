#include "trilat/fixed.hpp"

#include <gmp.h>
#include <mpfr.h>

#include "trilat/errors.hpp"

namespace trilat {

namespace {

// Working precision: comfortably above the widest table format (5 integer
// bits + 100 fractional bits) so the final round-to-nearest is decided by
// bits far below the retained ones.
constexpr mpfr_prec_t kWorkingPrecision = 192;

}  // namespace

u128 fixed_log_raw(std::uint64_t v, int fraction_bits) {
  if (v == 0) throw DomainError("fixed_log: logarithm of zero");
  if (fraction_bits <= 0 || fraction_bits > 110) throw DomainError("fixed_log: unsupported fraction width");
  if (v == 1) return 0;

  mpfr_t x;
  mpfr_init2(x, kWorkingPrecision);
  mpfr_set_ui(x, static_cast<unsigned long>(v), MPFR_RNDN);
  mpfr_log(x, x, MPFR_RNDN);
  mpfr_mul_2si(x, x, fraction_bits, MPFR_RNDN);
  mpfr_rint(x, x, MPFR_RNDN);

  mpz_t z;
  mpz_init(z);
  mpfr_get_z(z, x, MPFR_RNDN);
  mpfr_clear(x);

  // Export as two 64-bit limbs, least significant first.
  std::uint64_t words[2] = {0, 0};
  std::size_t count = 0;
  if (mpz_sizeinbase(z, 2) > 128) {
    mpz_clear(z);
    throw CapabilityError("fixed_log: result exceeds 128 bits");
  }
  mpz_export(words, &count, -1, sizeof(std::uint64_t), 0, 0, z);
  mpz_clear(z);
  return (u128(words[1]) << 64) | words[0];
}

}  // namespace trilat
