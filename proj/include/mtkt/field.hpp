#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>

#include "mtkt/bytes.hpp"

namespace mtkt {

using Limbs = std::array<std::uint64_t, 4>;  // little-endian 64-bit words

namespace detail {

using u128 = unsigned __int128;

constexpr std::uint64_t add_carry(std::uint64_t a, std::uint64_t b, std::uint64_t& carry) {
  u128 t = static_cast<u128>(a) + b + carry;
  carry = static_cast<std::uint64_t>(t >> 64);
  return static_cast<std::uint64_t>(t);
}

constexpr std::uint64_t sub_borrow(std::uint64_t a, std::uint64_t b, std::uint64_t& borrow) {
  u128 t = static_cast<u128>(a) - b - borrow;
  borrow = static_cast<std::uint64_t>(t >> 64) & 1;
  return static_cast<std::uint64_t>(t);
}

constexpr bool limbs_geq(const Limbs& a, const Limbs& b) {
  for (int i = 3; i >= 0; --i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return true;
}

constexpr Limbs limbs_sub(const Limbs& a, const Limbs& b) {
  Limbs r{};
  std::uint64_t borrow = 0;
  for (int i = 0; i < 4; ++i) r[i] = sub_borrow(a[i], b[i], borrow);
  return r;
}

// -m^{-1} mod 2^64 by Newton iteration; each step doubles the correct bits.
constexpr std::uint64_t neg_inverse64(std::uint64_t m0) {
  std::uint64_t x = 1;
  for (int i = 0; i < 6; ++i) x *= 2 - m0 * x;
  return ~x + 1;
}

// 2^(2*256) mod m by repeated modular doubling.
constexpr Limbs montgomery_r2(const Limbs& m) {
  Limbs r{1, 0, 0, 0};
  for (int i = 0; i < 512; ++i) {
    std::uint64_t carry = 0;
    Limbs d{};
    for (int j = 0; j < 4; ++j) d[j] = add_carry(r[j], r[j], carry);
    if (carry != 0 || limbs_geq(d, m)) d = limbs_sub(d, m);
    r = d;
  }
  return r;
}

// 2^(3*256) mod m: converts a plain inverse of a Montgomery value back into
// Montgomery form with one multiplication.
constexpr Limbs montgomery_r3(const Limbs& m) {
  Limbs r{1, 0, 0, 0};
  for (int i = 0; i < 768; ++i) {
    std::uint64_t carry = 0;
    Limbs d{};
    for (int j = 0; j < 4; ++j) d[j] = add_carry(r[j], r[j], carry);
    if (carry != 0 || limbs_geq(d, m)) d = limbs_sub(d, m);
    r = d;
  }
  return r;
}

// a^-1 mod m via GMP's extended gcd; a must be nonzero and reduced.
Limbs mod_inverse(const Limbs& a, const Limbs& m);

inline int limbs_bit_length(std::span<const std::uint64_t> e) {
  for (int i = static_cast<int>(e.size()) - 1; i >= 0; --i) {
    if (e[i] != 0) return 64 * i + 64 - __builtin_clzll(e[i]);
  }
  return 0;
}

inline bool limbs_bit(std::span<const std::uint64_t> e, int i) { return (e[i / 64] >> (i % 64)) & 1; }

}  // namespace detail

// Prime field of a 256-bit modulus in Montgomery form. `Tag` supplies
// `static constexpr Limbs kModulus`. Values are always fully reduced.
template <class Tag>
class MontField {
 public:
  static constexpr Limbs kModulus = Tag::kModulus;
  static constexpr std::uint64_t kInv = detail::neg_inverse64(kModulus[0]);
  static constexpr Limbs kR2 = detail::montgomery_r2(kModulus);
  static constexpr Limbs kR3 = detail::montgomery_r3(kModulus);

  constexpr MontField() = default;

  static MontField zero() { return MontField(); }
  static MontField one() { return from_u64(1); }

  static MontField from_u64(std::uint64_t v) { return from_limbs_unchecked(Limbs{v, 0, 0, 0}); }

  static MontField from_i64(std::int64_t v) {
    MontField r = from_u64(static_cast<std::uint64_t>(v < 0 ? -v : v));
    return v < 0 ? -r : r;
  }

  // `v` must already be < modulus.
  static MontField from_limbs_unchecked(const Limbs& v) {
    MontField r;
    r.v_ = v;
    return r * raw(kR2);
  }

  static std::optional<MontField> from_limbs(const Limbs& v) {
    if (detail::limbs_geq(v, kModulus)) return std::nullopt;
    return from_limbs_unchecked(v);
  }

  // Reduces an arbitrary 256-bit value modulo the field prime.
  static MontField from_limbs_reduce(Limbs v) {
    while (detail::limbs_geq(v, kModulus)) v = detail::limbs_sub(v, kModulus);
    return from_limbs_unchecked(v);
  }

  // 32-byte big-endian canonical encoding; rejects values >= modulus.
  static std::optional<MontField> from_bytes(ByteView b) {
    if (b.size() != 32) return std::nullopt;
    return from_limbs(bytes_to_limbs(b));
  }

  static MontField from_bytes_reduce(ByteView b) { return from_limbs_reduce(bytes_to_limbs(b)); }

  Limbs to_limbs() const {
    MontField one_raw;
    one_raw.v_ = Limbs{1, 0, 0, 0};
    return (*this * one_raw).v_;
  }

  std::array<std::uint8_t, 32> to_bytes() const {
    Limbs l = to_limbs();
    std::array<std::uint8_t, 32> out{};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 8; ++j) out[31 - (8 * i + j)] = static_cast<std::uint8_t>(l[i] >> (8 * j));
    }
    return out;
  }

  bool is_zero() const { return (v_[0] | v_[1] | v_[2] | v_[3]) == 0; }
  bool is_odd() const { return to_limbs()[0] & 1; }

  friend bool operator==(const MontField& a, const MontField& b) { return a.v_ == b.v_; }

  friend MontField operator+(const MontField& a, const MontField& b) {
    MontField r;
    std::uint64_t carry = 0;
    for (int i = 0; i < 4; ++i) r.v_[i] = detail::add_carry(a.v_[i], b.v_[i], carry);
    if (carry != 0 || detail::limbs_geq(r.v_, kModulus)) r.v_ = detail::limbs_sub(r.v_, kModulus);
    return r;
  }

  friend MontField operator-(const MontField& a, const MontField& b) {
    MontField r;
    std::uint64_t borrow = 0;
    for (int i = 0; i < 4; ++i) r.v_[i] = detail::sub_borrow(a.v_[i], b.v_[i], borrow);
    if (borrow != 0) {
      std::uint64_t carry = 0;
      for (int i = 0; i < 4; ++i) r.v_[i] = detail::add_carry(r.v_[i], kModulus[i], carry);
    }
    return r;
  }

  MontField operator-() const { return zero() - *this; }

  // CIOS Montgomery multiplication.
  friend MontField operator*(const MontField& a, const MontField& b) {
    using detail::u128;
    std::uint64_t t[6] = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) {
      std::uint64_t carry = 0;
      for (int j = 0; j < 4; ++j) {
        u128 s = static_cast<u128>(a.v_[j]) * b.v_[i] + t[j] + carry;
        t[j] = static_cast<std::uint64_t>(s);
        carry = static_cast<std::uint64_t>(s >> 64);
      }
      u128 s = static_cast<u128>(t[4]) + carry;
      t[4] = static_cast<std::uint64_t>(s);
      t[5] = static_cast<std::uint64_t>(s >> 64);

      std::uint64_t m = t[0] * kInv;
      s = static_cast<u128>(m) * kModulus[0] + t[0];
      carry = static_cast<std::uint64_t>(s >> 64);
      for (int j = 1; j < 4; ++j) {
        s = static_cast<u128>(m) * kModulus[j] + t[j] + carry;
        t[j - 1] = static_cast<std::uint64_t>(s);
        carry = static_cast<std::uint64_t>(s >> 64);
      }
      s = static_cast<u128>(t[4]) + carry;
      t[3] = static_cast<std::uint64_t>(s);
      t[4] = t[5] + static_cast<std::uint64_t>(s >> 64);
    }
    MontField r;
    r.v_ = Limbs{t[0], t[1], t[2], t[3]};
    if (t[4] != 0 || detail::limbs_geq(r.v_, kModulus)) r.v_ = detail::limbs_sub(r.v_, kModulus);
    return r;
  }

  MontField& operator+=(const MontField& o) { return *this = *this + o; }
  MontField& operator-=(const MontField& o) { return *this = *this - o; }
  MontField& operator*=(const MontField& o) { return *this = *this * o; }

  MontField square() const { return *this * *this; }
  MontField dbl() const { return *this + *this; }

  MontField pow(std::span<const std::uint64_t> exp) const {
    MontField r = one();
    for (int i = detail::limbs_bit_length(exp) - 1; i >= 0; --i) {
      r = r.square();
      if (detail::limbs_bit(exp, i)) r *= *this;
    }
    return r;
  }

  // Zero maps to zero.
  MontField inverse() const {
    if (is_zero()) return zero();
    // v = aR, so the plain inverse is a^-1 R^-1; multiplying by R^3 in
    // Montgomery form yields a^-1 R.
    return raw(detail::mod_inverse(v_, kModulus)) * raw(kR3);
  }

  // Legendre symbol as 1, -1 or 0.
  int legendre() const {
    if (is_zero()) return 0;
    static const Limbs kHalf = half_minus_one();
    return pow(kHalf) == one() ? 1 : -1;
  }

  // Tonelli-Shanks; nullopt for non-residues.
  std::optional<MontField> sqrt() const;

 private:
  static MontField raw(const Limbs& v) {
    MontField r;
    r.v_ = v;
    return r;
  }

  static Limbs bytes_to_limbs(ByteView b) {
    Limbs l{};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 8; ++j) l[i] |= static_cast<std::uint64_t>(b[31 - (8 * i + j)]) << (8 * j);
    }
    return l;
  }

  static Limbs half_minus_one() {
    Limbs l = detail::limbs_sub(kModulus, Limbs{1, 0, 0, 0});
    for (int i = 0; i < 4; ++i) l[i] = (l[i] >> 1) | (i < 3 ? l[i + 1] << 63 : 0);
    return l;
  }

  Limbs v_{};
};

template <class Tag>
std::optional<MontField<Tag>> MontField<Tag>::sqrt() const {
  using F = MontField<Tag>;
  if (is_zero()) return F::zero();
  if (legendre() != 1) return std::nullopt;

  struct Params {
    int s = 0;
    Limbs odd{};       // (m - 1) / 2^s
    Limbs odd_half{};  // (odd + 1) / 2
    F root_of_unity;   // z^odd for a non-residue z
  };
  static const Params params = [] {
    Params pr;
    Limbs t = detail::limbs_sub(kModulus, Limbs{1, 0, 0, 0});
    while ((t[0] & 1) == 0) {
      for (int i = 0; i < 4; ++i) t[i] = (t[i] >> 1) | (i < 3 ? t[i + 1] << 63 : 0);
      ++pr.s;
    }
    pr.odd = t;
    std::uint64_t carry = 0;
    Limbs h{};
    for (int i = 0; i < 4; ++i) h[i] = detail::add_carry(t[i], i == 0 ? 1 : 0, carry);
    for (int i = 0; i < 4; ++i) h[i] = (h[i] >> 1) | (i < 3 ? h[i + 1] << 63 : 0);
    pr.odd_half = h;
    std::uint64_t z = 2;
    while (F::from_u64(z).legendre() != -1) ++z;
    pr.root_of_unity = F::from_u64(z).pow(pr.odd);
    return pr;
  }();

  int m = params.s;
  F c = params.root_of_unity;
  F t = pow(params.odd);
  F r = pow(params.odd_half);
  while (!(t == F::one())) {
    int i = 0;
    F tt = t;
    while (!(tt == F::one())) {
      tt = tt.square();
      ++i;
    }
    F b = c;
    for (int j = 0; j < m - i - 1; ++j) b = b.square();
    m = i;
    c = b.square();
    t *= c;
    r *= b;
  }
  return r;
}

}  // namespace mtkt
