#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mtkt/bn256.hpp"
#include "mtkt/bytes.hpp"
#include "mtkt/rng.hpp"

namespace mtkt {

// Element of Z_p, p the prime group order.
using Scalar = bn::Fr;

inline constexpr std::size_t kScalarBytes = 32;
inline constexpr std::size_t kG1Bytes = 33;
inline constexpr std::size_t kG2Bytes = 128;

// Process-wide count of group operations (exponentiations, products,
// inversions in G1, G2 and GT). Used to assert that real-time phases do no
// group arithmetic.
std::uint64_t group_op_count();

namespace detail {
void count_group_ops(std::uint64_t n);
}

Scalar random_scalar(Rng& rng);
Scalar random_nonzero_scalar(Rng& rng);
std::array<std::uint8_t, kScalarBytes> encode_scalar(const Scalar& s);
// Rejects wrong length and non-canonical (>= p) encodings.
Scalar decode_scalar(ByteView b);
std::string scalar_to_decimal(const Scalar& s);
// Throws kParse unless the text is a decimal integer in [0, p).
Scalar scalar_from_decimal(std::string_view text);

// SHA-256(domain_tag || (u32 len || part)*) reduced mod p.
Scalar hash_to_scalar(std::string_view domain_tag, std::span<const ByteView> parts);
Scalar hash_to_scalar(std::string_view domain_tag, std::initializer_list<ByteView> parts);

// G1 in multiplicative notation.
class G1 {
 public:
  G1() = default;
  explicit G1(const bn::G1Point& p) : p_(p) {}

  static G1 identity() { return G1(); }
  // Deterministic try-and-increment hash onto the curve.
  static G1 hash_to_group(std::string_view tag);

  bool is_identity() const { return p_.is_identity(); }
  G1 pow(const Scalar& e) const;
  G1 inverse() const;
  friend G1 operator*(const G1& a, const G1& b);
  friend G1 operator/(const G1& a, const G1& b) { return a * b.inverse(); }
  G1& operator*=(const G1& o) { return *this = *this * o; }
  friend bool operator==(const G1& a, const G1& b) { return a.p_ == b.p_; }

  // prod_i bases[i]^exps[i]
  static G1 multi_pow(std::span<const G1> bases, std::span<const Scalar> exps);

  // 0x02|0x03 parity prefix + 32-byte big-endian x; identity is 33 zero bytes.
  std::array<std::uint8_t, kG1Bytes> encode() const;
  static G1 decode(ByteView b);

  const bn::G1Point& point() const { return p_; }

 private:
  bn::G1Point p_;
};

class G2 {
 public:
  G2() = default;
  explicit G2(const bn::G2Point& p) : p_(p) {}

  static G2 identity() { return G2(); }
  static G2 hash_to_group(std::string_view tag);

  bool is_identity() const { return p_.is_identity(); }
  G2 pow(const Scalar& e) const;
  G2 inverse() const;
  friend G2 operator*(const G2& a, const G2& b);
  friend bool operator==(const G2& a, const G2& b) { return a.p_ == b.p_; }

  static G2 multi_pow(std::span<const G2> bases, std::span<const Scalar> exps);

  // x.c0 || x.c1 || y.c0 || y.c1, 32 bytes each; identity is all zeros.
  std::array<std::uint8_t, kG2Bytes> encode() const;
  static G2 decode(ByteView b);

  const bn::G2Point& point() const { return p_; }

 private:
  bn::G2Point p_;
};

class GT {
 public:
  GT() : v_(bn::Fq12::one()) {}
  explicit GT(const bn::Fq12& v) : v_(v) {}

  static GT one() { return GT(); }
  bool is_one() const { return v_.is_one(); }
  GT pow(const Scalar& e) const;
  friend GT operator*(const GT& a, const GT& b);
  friend bool operator==(const GT& a, const GT& b) { return a.v_ == b.v_; }

  const bn::Fq12& value() const { return v_; }

 private:
  bn::Fq12 v_;
};

struct Generators {
  G1 g, g0, g1, gt, gT, gU, h, G, H;
  G2 g2, g3;
};

// The bilinear setting. Generators are immutable and shared between forks;
// each context carries its own pairing counter so that an actor's pairing
// usage can be asserted independently of everyone else's.
class GroupContext {
 public:
  GroupContext(const GroupContext&) = delete;
  GroupContext& operator=(const GroupContext&) = delete;
  GroupContext(GroupContext&& o) noexcept;
  GroupContext& operator=(GroupContext&&) = delete;

  const Generators& gens() const { return *gens_; }

  // Same generators, counter starting at zero.
  GroupContext fork() const { return GroupContext(gens_); }

  GT pair(const G1& a, const G2& b) const;
  std::uint64_t pairing_count() const { return pairing_count_.load(std::memory_order_relaxed); }
  void reset_pairing_count() { pairing_count_.store(0, std::memory_order_relaxed); }

  static std::string field_modulus_decimal();  // q
  static std::string group_order_decimal();    // p

 private:
  friend GroupContext default_context();
  explicit GroupContext(std::shared_ptr<const Generators> gens) : gens_(std::move(gens)) {}

  std::shared_ptr<const Generators> gens_;
  mutable std::atomic<std::uint64_t> pairing_count_{0};
};

// BN-256 context with generators derived from the fixed tags "gen:<name>".
// Throws Error(kInternal) if the embedded parameters fail their sanity checks.
GroupContext default_context();

}  // namespace mtkt
