#pragma once

// Glue between GMP integers and the library's scalars and byte encodings.

#include <gmpxx.h>

#include "mtkt/bytes.hpp"
#include "mtkt/group.hpp"

namespace mtkt {

mpz_class scalar_to_mpz(const Scalar& s);
// Reduces mod p; negative values wrap.
Scalar scalar_from_mpz(const mpz_class& v);
const mpz_class& group_order();

// Minimal big-endian magnitude; zero encodes as the empty string.
Bytes mpz_to_bytes(const mpz_class& v);
mpz_class mpz_from_bytes(ByteView b);
// Left-padded to exactly len bytes; throws kInvalidArgument if it does not fit.
Bytes mpz_to_fixed(const mpz_class& v, std::size_t len);

// u32 length + magnitude. Negative values are rejected on write.
void write_mpz(ByteWriter& w, const mpz_class& v);
mpz_class read_mpz(ByteReader& r);

// Uniform in [0, 2^bits).
mpz_class random_bits(Rng& rng, std::size_t bits);
// Uniform in [0, bound) by rejection.
mpz_class random_below(Rng& rng, const mpz_class& bound);

}  // namespace mtkt
