#pragma once

// RSA signatures for validator authentication: PKCS#1 v1.5 padding with a
// SHA-256 DigestInfo. Keys are generated from the library DRBG so seeded
// runs are reproducible.

#include <gmpxx.h>

#include "mtkt/bigint.hpp"
#include "mtkt/rng.hpp"

namespace mtkt {

inline constexpr std::size_t kValidatorRsaBits = 1984;
inline constexpr unsigned long kRsaExponent = 65537;

struct RsaPublicKey {
  mpz_class n;
  mpz_class e;

  std::size_t bits() const { return mpz_sizeinbase(n.get_mpz_t(), 2); }
  std::size_t byte_length() const { return (bits() + 7) / 8; }
  // Throws kInvalidArgument unless |n| = 1984 and e = 65537.
  void require_validator_shape() const;

  Bytes serialize() const;
  static RsaPublicKey deserialize(ByteView b);
  friend bool operator==(const RsaPublicKey& a, const RsaPublicKey& b) { return a.n == b.n && a.e == b.e; }
};

struct RsaKeyPair {
  RsaPublicKey pub;
  mpz_class d, p, q;

  static RsaKeyPair generate(Rng& rng, std::size_t bits = kValidatorRsaBits);

  Bytes serialize() const;
  static RsaKeyPair deserialize(ByteView b);
};

// 00 01 FF..FF 00 || DigestInfo(SHA-256) || SHA-256(msg), k bytes total.
Bytes pkcs1_v15_sha256_encode(ByteView msg, std::size_t k);

Bytes rsa_sign(const RsaKeyPair& key, ByteView msg);
bool rsa_verify(const RsaPublicKey& pub, ByteView msg, ByteView sig);

}  // namespace mtkt
