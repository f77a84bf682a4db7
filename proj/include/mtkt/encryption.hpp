#pragma once

// ElGamal over G1 and Paillier over Z_{n^2}, both with t-of-n threshold
// decryption from a trusted dealer, plus the proof that a Paillier plaintext
// equals the exponent of a G1 commitment.

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "mtkt/bigint.hpp"
#include "mtkt/group.hpp"

namespace mtkt {

// ---- Shamir sharing over Z_p ------------------------------------------------

struct ScalarShare {
  std::uint32_t index = 0;  // evaluation point, 1..n
  Scalar value;
  std::uint32_t t = 0, n = 0;

  Bytes serialize() const;
  static ScalarShare deserialize(ByteView b);
  friend bool operator==(const ScalarShare&, const ScalarShare&) = default;
};

// Throws kInvalidArgument unless 1 <= t <= n.
std::vector<ScalarShare> shamir_share(const Scalar& secret, std::uint32_t t, std::uint32_t n, Rng& rng);
// Needs at least t shares with distinct indices, else kInsufficientShares.
Scalar shamir_reconstruct(std::span<const ScalarShare> shares);
// Lagrange coefficient of indices[at] for interpolation at zero.
Scalar lagrange_at_zero(std::span<const std::uint32_t> indices, std::size_t at);

// ---- ElGamal ------------------------------------------------------------------

struct ElGamalCiphertext {
  G1 C1, C2;

  Bytes serialize() const;  // 66 bytes
  static ElGamalCiphertext deserialize(ByteView b);
  friend bool operator==(const ElGamalCiphertext&, const ElGamalCiphertext&) = default;
};

struct ElGamalKeys {
  Scalar xT;
  G1 hT;  // gT^xT
  std::vector<ScalarShare> shares;

  static ElGamalKeys generate(const GroupContext& ctx, std::uint32_t t, std::uint32_t n, Rng& rng);
};

// (gT^r, m * hT^r)
ElGamalCiphertext elgamal_encrypt(const GroupContext& ctx, const G1& hT, const G1& m, const Scalar& r);
G1 elgamal_decrypt(const Scalar& xT, const ElGamalCiphertext& ct);
// Multiplies in a fresh encryption of 1 under r.
ElGamalCiphertext elgamal_rerandomize(const GroupContext& ctx, const G1& hT, const ElGamalCiphertext& ct,
                                      const Scalar& r);

struct ElGamalPartial {
  std::uint32_t index = 0;
  std::uint32_t t = 0;
  G1 value;  // C1^share
};

ElGamalPartial elgamal_partial_decrypt(const ScalarShare& share, const ElGamalCiphertext& ct);
// Throws kInsufficientShares with fewer than t distinct partials.
G1 elgamal_combine(const ElGamalCiphertext& ct, std::span<const ElGamalPartial> partials);

// ---- Paillier -----------------------------------------------------------------

inline constexpr std::size_t kMinPaillierBits = 2048;

struct PaillierPublicKey {
  mpz_class n;
  mpz_class n2;  // n^2
  mpz_class g;   // 1 + n

  static PaillierPublicKey from_modulus(const mpz_class& n);
  std::size_t bits() const { return mpz_sizeinbase(n.get_mpz_t(), 2); }

  Bytes serialize() const;
  static PaillierPublicKey deserialize(ByteView b);
  friend bool operator==(const PaillierPublicKey& a, const PaillierPublicKey& b) { return a.n == b.n; }
};

struct PaillierSecretKey {
  mpz_class a, b;
  mpz_class lambda;  // lcm(a-1, b-1)
  mpz_class mu;      // lambda^-1 mod n
};

struct PaillierKeyPair {
  PaillierPublicKey pk;
  PaillierSecretKey sk;

  // Two bits/2-bit primes found by nextprime from DRBG output, so a seeded
  // generator reproduces the key. Throws kInvalidArgument below 2048 bits.
  static PaillierKeyPair generate(Rng& rng, std::size_t bits = kMinPaillierBits);
  // Test hook that skips the minimum size.
  static PaillierKeyPair generate_unchecked(Rng& rng, std::size_t bits);
};

struct PaillierCiphertext {
  mpz_class value;
  friend bool operator==(const PaillierCiphertext& a, const PaillierCiphertext& b) { return a.value == b.value; }
};

// g^m j^n mod n^2. Throws kInvalidArgument unless 0 <= m < n and gcd(j, n) = 1.
PaillierCiphertext paillier_encrypt(const PaillierPublicKey& pk, const mpz_class& m, const mpz_class& j);
mpz_class paillier_random_unit(const PaillierPublicKey& pk, Rng& rng);
mpz_class paillier_decrypt(const PaillierPublicKey& pk, const PaillierSecretKey& sk, const PaillierCiphertext& c);

// Threshold Paillier: the dealer shares d with d = 0 mod lambda, d = 1 mod n
// over Z_{n*lambda}. With delta = N! (N parties) each share holder returns
// C^share and the combiner raises to delta * lagrange, which is integral.
struct PaillierShare {
  std::uint32_t index = 0;
  mpz_class value;
  std::uint32_t t = 0, n = 0;

  Bytes serialize() const;
  static PaillierShare deserialize(ByteView b);
};

std::vector<PaillierShare> paillier_share(const PaillierKeyPair& key, std::uint32_t t, std::uint32_t n, Rng& rng);

struct PaillierPartial {
  std::uint32_t index = 0;
  std::uint32_t t = 0, n = 0;
  mpz_class value;
};

PaillierPartial paillier_partial_decrypt(const PaillierPublicKey& pk, const PaillierShare& share,
                                         const PaillierCiphertext& c);
// Throws kInsufficientShares with fewer than t distinct partials.
mpz_class paillier_combine(const PaillierPublicKey& pk, std::span<const PaillierPartial> partials);

// ---- Paillier/Pedersen equality proof ------------------------------------------

// POK(s1, j: Com = g1^s1, C0 = g^s1 j^n mod n^2) with integer responses.
// Masks: m_r of |p| + 256 bits, j_r in Z*_n; challenge is 128 bits so that
// it stays below both p and the factors of n.
struct PaillierPedersenProof {
  G1 u1;
  mpz_class u2;
  mpz_class c;
  mpz_class z_m;
  mpz_class z_j;

  Bytes serialize() const;
  static PaillierPedersenProof deserialize(ByteView b);
  friend bool operator==(const PaillierPedersenProof&, const PaillierPedersenProof&) = default;
};

inline constexpr std::size_t kPi1ChallengeBits = 128;
inline constexpr std::size_t kPi1MaskBits = 256 + 2 * 128;

PaillierPedersenProof pi1_prove(const GroupContext& ctx, const PaillierPublicKey& pk, const Scalar& s1,
                                const mpz_class& j, const G1& com, const PaillierCiphertext& c0, Rng& rng);
bool pi1_verify(const GroupContext& ctx, const PaillierPublicKey& pk, const G1& com, const PaillierCiphertext& c0,
                const PaillierPedersenProof& proof);

namespace detail {
// Lagrange combination without the share-count check, for showing that
// fewer than t partials give the wrong plaintext.
G1 elgamal_combine_unchecked(const ElGamalCiphertext& ct, std::span<const ElGamalPartial> partials);
mpz_class paillier_combine_unchecked(const PaillierPublicKey& pk, std::span<const PaillierPartial> partials);
mpz_class pi1_challenge(const PaillierPublicKey& pk, const G1& com, const PaillierCiphertext& c0, const G1& u1,
                        const mpz_class& u2);
}  // namespace detail

}  // namespace mtkt
