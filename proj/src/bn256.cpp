#include "mtkt/bn256.hpp"

#include <gmpxx.h>

#include <vector>

namespace mtkt::bn {

namespace {

std::vector<std::uint64_t> mpz_to_limbs(const mpz_class& v) {
  std::size_t count = (mpz_sizeinbase(v.get_mpz_t(), 2) + 63) / 64;
  std::vector<std::uint64_t> out(count == 0 ? 1 : count, 0);
  mpz_export(out.data(), nullptr, -1, sizeof(std::uint64_t), 0, 0, v.get_mpz_t());
  return out;
}

mpz_class limbs_to_mpz(const Limbs& l) {
  mpz_class v;
  mpz_import(v.get_mpz_t(), l.size(), -1, sizeof(std::uint64_t), 0, 0, l.data());
  return v;
}

const mpz_class& field_q() {
  static const mpz_class q = limbs_to_mpz(FqTag::kModulus);
  return q;
}

const mpz_class& field_r() {
  static const mpz_class r = limbs_to_mpz(FrTag::kModulus);
  return r;
}

Fq2 xi() { return {Fq::zero(), Fq::one()}; }

// gamma[k][j] = xi^(j (q^k - 1) / 6) for k = 1..3, j = 0..5
struct FrobeniusTable {
  std::array<std::array<Fq2, 6>, 4> gamma;
  Fq2 twist_x1, twist_y1;  // xi^((q-1)/3), xi^((q-1)/2)
  Fq2 twist_x2, twist_y2;  // xi^((q^2-1)/3), xi^((q^2-1)/2)
};

const FrobeniusTable& frobenius_table() {
  static const FrobeniusTable table = [] {
    FrobeniusTable t;
    const mpz_class& q = field_q();
    mpz_class qk = 1;
    for (int k = 1; k <= 3; ++k) {
      qk *= q;
      mpz_class e = (qk - 1) / 6;
      Fq2 base = xi().pow(mpz_to_limbs(e));
      Fq2 acc = Fq2::one();
      for (int j = 0; j < 6; ++j) {
        t.gamma[k][j] = acc;
        acc *= base;
      }
    }
    t.twist_x1 = t.gamma[1][2];
    t.twist_y1 = t.gamma[1][3];
    t.twist_x2 = t.gamma[2][2];
    t.twist_y2 = t.gamma[2][3];
    return t;
  }();
  return table;
}

// f * l for the sparse line value l = yp + a*w + b*w^3, i.e. l.c0 = yp and
// l.c1 = a + b*v.
Fq12 mul_by_line(const Fq12& f, const Fq& yp, const Fq2& a, const Fq2& b) {
  Fq6 t0 = {f.c0.c0 * yp, f.c0.c1 * yp, f.c0.c2 * yp};
  const Fq6& y = f.c1;
  Fq2 s0 = y.c0 * a;
  Fq2 s1 = y.c1 * b;
  Fq6 t1 = {(y.c2 * b).mul_by_xi() + s0, (y.c0 + y.c1) * (a + b) - s0 - s1, y.c2 * a + s1};
  // (c0 + c1)(yp + a + b v) - t0 - t1
  Fq6 sum = f.c0 + f.c1;
  Fq6 lsum = {a + Fq2{yp, Fq::zero()}, b, Fq2::zero()};
  Fq6 cross = sum * lsum - t0 - t1;
  return {t0 + t1.mul_by_v(), cross};
}

struct AffineG2 {
  Fq2 x, y;
};

// Doubling step: returns line through T tangent at T evaluated at P, updates T.
void dbl_step(AffineG2& t, const Fq& xp, const Fq& yp, Fq12& f) {
  Fq2 x2 = t.x.square();
  Fq2 lambda = (x2.dbl() + x2) * t.y.dbl().inverse();
  Fq2 a = -(lambda * xp);
  Fq2 b = lambda * t.x - t.y;
  f = mul_by_line(f, yp, a, b);
  Fq2 x3 = lambda.square() - t.x.dbl();
  Fq2 y3 = lambda * (t.x - x3) - t.y;
  t = {x3, y3};
}

void add_step(AffineG2& t, const AffineG2& q, const Fq& xp, const Fq& yp, Fq12& f) {
  Fq2 dx = q.x - t.x;
  if (dx.is_zero()) {
    if ((q.y + t.y).is_zero()) return;  // vertical line: eliminated by the final exponentiation
    dbl_step(t, xp, yp, f);
    return;
  }
  Fq2 lambda = (q.y - t.y) * dx.inverse();
  Fq2 a = -(lambda * xp);
  Fq2 b = lambda * t.x - t.y;
  f = mul_by_line(f, yp, a, b);
  Fq2 x3 = lambda.square() - t.x - q.x;
  Fq2 y3 = lambda * (t.x - x3) - t.y;
  t = {x3, y3};
}

Fq12 pow_u(const Fq12& f) {
  const std::uint64_t e[1] = {kBnU};
  return f.pow(e);
}

}  // namespace

Fq2 Fq2::pow(std::span<const std::uint64_t> exp) const {
  Fq2 r = one();
  for (int i = detail::limbs_bit_length(exp) - 1; i >= 0; --i) {
    r = r.square();
    if (detail::limbs_bit(exp, i)) r *= *this;
  }
  return r;
}

std::optional<Fq2> Fq2::sqrt() const {
  if (is_zero()) return zero();
  if (c1.is_zero()) {
    if (auto r = c0.sqrt()) return Fq2{*r, Fq::zero()};
    // (y i)^2 = -5 y^2 = c0
    Fq minus_fifth = (-Fq::from_u64(5)).inverse();
    if (auto r = (c0 * minus_fifth).sqrt()) return Fq2{Fq::zero(), *r};
    return std::nullopt;
  }
  auto n = norm().sqrt();
  if (!n) return std::nullopt;
  const Fq half = Fq::from_u64(2).inverse();
  for (const Fq& cand : {c0 + *n, c0 - *n}) {
    auto x0 = (cand * half).sqrt();
    if (!x0 || x0->is_zero()) continue;
    Fq x1 = c1 * x0->dbl().inverse();
    Fq2 r{*x0, x1};
    if (r.square() == *this) return r;
  }
  return std::nullopt;
}

Fq12 Fq12::frobenius(int power) const {
  const auto& g = frobenius_table().gamma[power];
  auto map = [&](const Fq2& c, int j) { return ((power & 1) ? c.conj() : c) * g[j]; };
  Fq12 r;
  r.c0.c0 = map(c0.c0, 0);
  r.c1.c0 = map(c1.c0, 1);
  r.c0.c1 = map(c0.c1, 2);
  r.c1.c1 = map(c1.c1, 3);
  r.c0.c2 = map(c0.c2, 4);
  r.c1.c2 = map(c1.c2, 5);
  return r;
}

Fq12 Fq12::pow(std::span<const std::uint64_t> exp) const {
  Fq12 r = one();
  for (int i = detail::limbs_bit_length(exp) - 1; i >= 0; --i) {
    r = r.square();
    if (detail::limbs_bit(exp, i)) r *= *this;
  }
  return r;
}

std::array<std::uint8_t, 384> Fq12::to_bytes() const {
  std::array<std::uint8_t, 384> out{};
  const Fq2* parts[6] = {&c0.c0, &c0.c1, &c0.c2, &c1.c0, &c1.c1, &c1.c2};
  std::size_t off = 0;
  for (const Fq2* p : parts) {
    for (const Fq* x : {&p->c0, &p->c1}) {
      auto b = x->to_bytes();
      std::copy(b.begin(), b.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
      off += 32;
    }
  }
  return out;
}

Fq12 final_exponentiation(const Fq12& f) {
  // easy part: f^((q^6 - 1)(q^2 + 1))
  Fq12 t = f.conj() * f.inverse();
  t = t.frobenius(2) * t;

  // hard part (q^4 - q^2 + 1)/r via the BN addition chain in u
  Fq12 ft1 = pow_u(t);
  Fq12 ft2 = pow_u(ft1);
  Fq12 ft3 = pow_u(ft2);
  Fq12 y0 = t.frobenius(1) * t.frobenius(2) * t.frobenius(3);
  Fq12 y1 = t.conj();
  Fq12 y2 = ft2.frobenius(2);
  Fq12 y3 = ft1.frobenius(1).conj();
  Fq12 y4 = (ft1 * ft2.frobenius(1)).conj();
  Fq12 y5 = ft2.conj();
  Fq12 y6 = (ft3 * ft3.frobenius(1)).conj();

  Fq12 t0 = y6.square() * y4 * y5;
  Fq12 t1 = y3 * y5 * t0;
  t0 = t0 * y2;
  t1 = (t1.square() * t0).square();
  t0 = t1 * y1;
  t1 = t1 * y0;
  t0 = t0.square();
  return t1 * t0;
}

Fq12 final_exponentiation_naive(const Fq12& f) {
  static const std::vector<std::uint64_t> exp = [] {
    mpz_class q12;
    mpz_pow_ui(q12.get_mpz_t(), field_q().get_mpz_t(), 12);
    return mpz_to_limbs((q12 - 1) / field_r());
  }();
  return f.pow(exp);
}

Fq12 optimal_ate(const G1Point& p, const G2Point& q) {
  if (p.is_identity() || q.is_identity()) return Fq12::one();
  auto [xp, yp] = p.to_affine();
  auto [qx, qy] = q.to_affine();
  const AffineG2 base{qx, qy};

  // 6u + 2
  static const std::vector<std::uint64_t> loop = [] {
    mpz_class u = static_cast<unsigned long>(kBnU);
    return mpz_to_limbs(6 * u + 2);
  }();

  Fq12 f = Fq12::one();
  AffineG2 t = base;
  for (int i = detail::limbs_bit_length(loop) - 2; i >= 0; --i) {
    f = f.square();
    dbl_step(t, xp, yp, f);
    if (detail::limbs_bit(loop, i)) add_step(t, base, xp, yp, f);
  }

  const auto& fr = frobenius_table();
  AffineG2 q1{base.x.conj() * fr.twist_x1, base.y.conj() * fr.twist_y1};
  AffineG2 q2{base.x * fr.twist_x2, -(base.y * fr.twist_y2)};
  add_step(t, q1, xp, yp, f);
  add_step(t, q2, xp, yp, f);
  return final_exponentiation(f);
}

}  // namespace mtkt::bn
