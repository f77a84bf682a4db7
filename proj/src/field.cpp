#include "mtkt/field.hpp"

#include <gmp.h>

namespace mtkt::detail {

static_assert(sizeof(mp_limb_t) == sizeof(std::uint64_t), "GMP limbs must be 64-bit");

Limbs mod_inverse(const Limbs& a, const Limbs& m) {
  mpz_t za, zm, r;
  mpz_roinit_n(za, reinterpret_cast<const mp_limb_t*>(a.data()), 4);
  mpz_roinit_n(zm, reinterpret_cast<const mp_limb_t*>(m.data()), 4);
  mpz_init(r);
  mpz_invert(r, za, zm);
  Limbs out{};
  mpz_export(out.data(), nullptr, -1, sizeof(std::uint64_t), 0, 0, r);
  mpz_clear(r);
  return out;
}

}  // namespace mtkt::detail
