#pragma once

// Arithmetic for the 256-bit Barreto-Naehrig curve E: y^2 = x^3 + 5 with
// BN parameter u = 0x60000000000031d8 (q = 36u^4 + 36u^3 + 24u^2 + 6u + 1).
//
// Tower: Fq2 = Fq[i]/(i^2 + 5), Fq6 = Fq2[v]/(v^3 - i), Fq12 = Fq6[w]/(w^2 - v).
// G2 lives on the D-type sextic twist E': y^2 = x^3 + 5/i = x^3 - i.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mtkt/field.hpp"

namespace mtkt::bn {

struct FqTag {
  static constexpr Limbs kModulus = {0x4d3ec756e75bd911ULL, 0xe000660a4d59f252ULL, 0x2600000126ca96dbULL,
                                     0xb640000000017a82ULL};
};
struct FrTag {
  static constexpr Limbs kModulus = {0x4d3ec756ad217391ULL, 0x0800660a4d591206ULL, 0x2600000126ca96dbULL,
                                     0xb640000000017a82ULL};
};

using Fq = MontField<FqTag>;
using Fr = MontField<FrTag>;

inline constexpr std::uint64_t kBnU = 0x60000000000031d8ULL;
inline constexpr std::int64_t kFq2NonResidue = -5;  // i^2
// #E'(Fq2) / r = 2q - r
inline constexpr Limbs kG2Cofactor = {0x4d3ec75721963e91ULL, 0xb800660a4d5ad29eULL, 0x2600000126ca96dcULL,
                                      0xb640000000017a82ULL};

struct Fq2 {
  Fq c0, c1;

  static Fq2 zero() { return {}; }
  static Fq2 one() { return {Fq::one(), Fq::zero()}; }

  bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
  friend bool operator==(const Fq2&, const Fq2&) = default;

  friend Fq2 operator+(const Fq2& a, const Fq2& b) { return {a.c0 + b.c0, a.c1 + b.c1}; }
  friend Fq2 operator-(const Fq2& a, const Fq2& b) { return {a.c0 - b.c0, a.c1 - b.c1}; }
  Fq2 operator-() const { return {-c0, -c1}; }

  static Fq times5(const Fq& x) {
    Fq x2 = x.dbl();
    return x2.dbl() + x;
  }

  friend Fq2 operator*(const Fq2& a, const Fq2& b) {
    Fq t0 = a.c0 * b.c0;
    Fq t1 = a.c1 * b.c1;
    Fq cross = (a.c0 + a.c1) * (b.c0 + b.c1) - t0 - t1;
    return {t0 - times5(t1), cross};
  }
  Fq2 operator*(const Fq& s) const { return {c0 * s, c1 * s}; }

  Fq2& operator+=(const Fq2& o) { return *this = *this + o; }
  Fq2& operator-=(const Fq2& o) { return *this = *this - o; }
  Fq2& operator*=(const Fq2& o) { return *this = *this * o; }

  Fq2 square() const {
    Fq t = c0 * c1;
    return {c0.square() - times5(c1.square()), t.dbl()};
  }
  Fq2 dbl() const { return {c0.dbl(), c1.dbl()}; }
  Fq2 conj() const { return {c0, -c1}; }
  // multiplication by the sextic non-residue xi = i
  Fq2 mul_by_xi() const { return {-times5(c1), c0}; }

  Fq norm() const { return c0.square() + times5(c1.square()); }
  Fq2 inverse() const {
    Fq n = norm().inverse();
    return {c0 * n, -(c1 * n)};
  }
  Fq2 pow(std::span<const std::uint64_t> exp) const;
  std::optional<Fq2> sqrt() const;
};

struct Fq6 {
  Fq2 c0, c1, c2;

  static Fq6 zero() { return {}; }
  static Fq6 one() { return {Fq2::one(), {}, {}}; }
  bool is_zero() const { return c0.is_zero() && c1.is_zero() && c2.is_zero(); }
  friend bool operator==(const Fq6&, const Fq6&) = default;

  friend Fq6 operator+(const Fq6& a, const Fq6& b) { return {a.c0 + b.c0, a.c1 + b.c1, a.c2 + b.c2}; }
  friend Fq6 operator-(const Fq6& a, const Fq6& b) { return {a.c0 - b.c0, a.c1 - b.c1, a.c2 - b.c2}; }
  Fq6 operator-() const { return {-c0, -c1, -c2}; }

  friend Fq6 operator*(const Fq6& a, const Fq6& b) {
    Fq2 t0 = a.c0 * b.c0;
    Fq2 t1 = a.c1 * b.c1;
    Fq2 t2 = a.c2 * b.c2;
    Fq2 r0 = ((a.c1 + a.c2) * (b.c1 + b.c2) - t1 - t2).mul_by_xi() + t0;
    Fq2 r1 = (a.c0 + a.c1) * (b.c0 + b.c1) - t0 - t1 + t2.mul_by_xi();
    Fq2 r2 = (a.c0 + a.c2) * (b.c0 + b.c2) - t0 - t2 + t1;
    return {r0, r1, r2};
  }
  Fq6 operator*(const Fq2& s) const { return {c0 * s, c1 * s, c2 * s}; }

  Fq6 mul_by_v() const { return {c2.mul_by_xi(), c0, c1}; }
  Fq6 square() const { return *this * *this; }

  Fq6 inverse() const {
    Fq2 a = c0.square() - (c1 * c2).mul_by_xi();
    Fq2 b = c2.square().mul_by_xi() - c0 * c1;
    Fq2 c = c1.square() - c0 * c2;
    Fq2 f = c0 * a + (c2 * b + c1 * c).mul_by_xi();
    Fq2 fi = f.inverse();
    return {a * fi, b * fi, c * fi};
  }
};

struct Fq12 {
  Fq6 c0, c1;

  static Fq12 one() { return {Fq6::one(), {}}; }
  bool is_one() const { return *this == one(); }
  friend bool operator==(const Fq12&, const Fq12&) = default;

  friend Fq12 operator*(const Fq12& a, const Fq12& b) {
    Fq6 t0 = a.c0 * b.c0;
    Fq6 t1 = a.c1 * b.c1;
    return {t0 + t1.mul_by_v(), (a.c0 + a.c1) * (b.c0 + b.c1) - t0 - t1};
  }
  Fq12& operator*=(const Fq12& o) { return *this = *this * o; }

  Fq12 square() const {
    Fq6 t = c0 * c1;
    Fq6 r0 = (c0 + c1) * (c0 + c1.mul_by_v()) - t - t.mul_by_v();
    return {r0, t + t};
  }
  // x^(q^6): the unitary inverse on the cyclotomic subgroup
  Fq12 conj() const { return {c0, -c1}; }
  Fq12 inverse() const {
    Fq6 t = (c0.square() - c1.square().mul_by_v()).inverse();
    return {c0 * t, -(c1 * t)};
  }
  // x^(q^power) for power in 1..3
  Fq12 frobenius(int power) const;
  Fq12 pow(std::span<const std::uint64_t> exp) const;

  std::array<std::uint8_t, 384> to_bytes() const;
};

// Short Weierstrass a = 0 curve in Jacobian coordinates.
template <class F>
struct CurveB;
template <>
struct CurveB<Fq> {
  static Fq b() { return Fq::from_u64(5); }
};
template <>
struct CurveB<Fq2> {
  static Fq2 b() { return {Fq::zero(), -Fq::one()}; }
};

template <class F>
class JacobianPoint {
 public:
  JacobianPoint() : x_(F::one()), y_(F::one()), z_(F::zero()) {}

  static JacobianPoint identity() { return {}; }
  static JacobianPoint from_affine(const F& x, const F& y) { return JacobianPoint(x, y, F::one()); }

  bool is_identity() const { return z_.is_zero(); }

  static bool on_curve(const F& x, const F& y) { return y.square() == x.square() * x + CurveB<F>::b(); }

  // Affine coordinates; must not be called on the identity.
  std::pair<F, F> to_affine() const {
    F zi = z_.inverse();
    F zi2 = zi.square();
    return {x_ * zi2, y_ * zi2 * zi};
  }

  JacobianPoint dbl() const {
    if (is_identity()) return *this;
    F a = x_.square();
    F b = y_.square();
    F c = b.square();
    F d = ((x_ + b).square() - a - c).dbl();
    F e = a.dbl() + a;
    F f = e.square();
    F x3 = f - d.dbl();
    F c8 = c.dbl().dbl().dbl();
    F y3 = e * (d - x3) - c8;
    F z3 = (y_ * z_).dbl();
    return JacobianPoint(x3, y3, z3);
  }

  JacobianPoint add(const JacobianPoint& o) const {
    if (is_identity()) return o;
    if (o.is_identity()) return *this;
    F z1z1 = z_.square();
    F z2z2 = o.z_.square();
    F u1 = x_ * z2z2;
    F u2 = o.x_ * z1z1;
    F s1 = y_ * o.z_ * z2z2;
    F s2 = o.y_ * z_ * z1z1;
    F h = u2 - u1;
    F r = (s2 - s1).dbl();
    if (h.is_zero()) {
      if (r.is_zero()) return dbl();
      return identity();
    }
    F i = h.dbl().square();
    F j = h * i;
    F v = u1 * i;
    F x3 = r.square() - j - v.dbl();
    F y3 = r * (v - x3) - (s1 * j).dbl();
    F z3 = ((z_ + o.z_).square() - z1z1 - z2z2) * h;
    return JacobianPoint(x3, y3, z3);
  }

  JacobianPoint neg() const { return JacobianPoint(x_, -y_, z_); }

  // Fixed 4-bit window scalar multiplication by a little-endian integer.
  JacobianPoint mul(std::span<const std::uint64_t> k) const {
    std::array<JacobianPoint, 16> table;
    table[0] = identity();
    for (int i = 1; i < 16; ++i) table[i] = table[i - 1].add(*this);
    int bits = detail::limbs_bit_length(k);
    JacobianPoint acc;
    for (int w = (bits + 3) / 4 - 1; w >= 0; --w) {
      acc = acc.dbl().dbl().dbl().dbl();
      unsigned nib = static_cast<unsigned>((k[w / 16] >> (4 * (w % 16))) & 0xf);
      if (nib != 0) acc = acc.add(table[nib]);
    }
    return acc;
  }

  // Interleaved (Straus) multi-scalar multiplication: sum_i k_i * P_i.
  static JacobianPoint multi_mul(std::span<const JacobianPoint> points, std::span<const Limbs> scalars) {
    const std::size_t n = points.size();
    std::vector<std::array<JacobianPoint, 16>> tables(n);
    int bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      tables[i][0] = identity();
      for (int j = 1; j < 16; ++j) tables[i][j] = tables[i][j - 1].add(points[i]);
      bits = std::max(bits, detail::limbs_bit_length(scalars[i]));
    }
    JacobianPoint acc;
    for (int w = (bits + 3) / 4 - 1; w >= 0; --w) {
      acc = acc.dbl().dbl().dbl().dbl();
      for (std::size_t i = 0; i < n; ++i) {
        unsigned nib = static_cast<unsigned>((scalars[i][w / 16] >> (4 * (w % 16))) & 0xf);
        if (nib != 0) acc = acc.add(tables[i][nib]);
      }
    }
    return acc;
  }

  friend bool operator==(const JacobianPoint& a, const JacobianPoint& b) {
    if (a.is_identity() || b.is_identity()) return a.is_identity() && b.is_identity();
    F z1z1 = a.z_.square();
    F z2z2 = b.z_.square();
    if (!(a.x_ * z2z2 == b.x_ * z1z1)) return false;
    return a.y_ * z2z2 * b.z_ == b.y_ * z1z1 * a.z_;
  }

 private:
  JacobianPoint(const F& x, const F& y, const F& z) : x_(x), y_(y), z_(z) {}

  F x_, y_, z_;
};

using G1Point = JacobianPoint<Fq>;
using G2Point = JacobianPoint<Fq2>;

// Optimal ate pairing. Callers should go through GroupContext::pair so the
// evaluation is counted.
Fq12 optimal_ate(const G1Point& p, const G2Point& q);

// Final exponentiation by (q^12 - 1)/r; exposed for tests.
Fq12 final_exponentiation(const Fq12& f);
// Reference final exponentiation by plain square-and-multiply; test oracle.
Fq12 final_exponentiation_naive(const Fq12& f);

}  // namespace mtkt::bn
