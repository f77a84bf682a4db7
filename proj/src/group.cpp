#include "mtkt/group.hpp"

#include <gmpxx.h>

#include <algorithm>

#include "mtkt/error.hpp"
#include "mtkt/sha256.hpp"

namespace mtkt {

namespace {

std::atomic<std::uint64_t> g_group_ops{0};

mpz_class limbs_to_mpz(const Limbs& l) {
  mpz_class v;
  mpz_import(v.get_mpz_t(), l.size(), -1, sizeof(std::uint64_t), 0, 0, l.data());
  return v;
}

std::vector<Limbs> to_limbs(std::span<const Scalar> exps) {
  std::vector<Limbs> out;
  out.reserve(exps.size());
  for (const auto& e : exps) out.push_back(e.to_limbs());
  return out;
}

Digest tagged_digest(std::string_view domain, std::string_view tag, std::uint32_t counter, std::uint8_t lane) {
  ByteWriter w;
  w.str(domain);
  w.str(tag);
  w.u32(counter);
  w.u8(lane);
  return Sha256::hash(w.bytes());
}

bn::Fq decode_fq(ByteView b) {
  auto v = bn::Fq::from_bytes(b);
  if (!v) throw Error(ErrorCode::kDecode, "non-canonical field element");
  return *v;
}

}  // namespace

std::uint64_t group_op_count() { return g_group_ops.load(std::memory_order_relaxed); }

void detail::count_group_ops(std::uint64_t n) { g_group_ops.fetch_add(n, std::memory_order_relaxed); }

Scalar random_scalar(Rng& rng) {
  std::array<std::uint8_t, 32> buf{};
  while (true) {
    rng.fill(buf);
    if (auto s = Scalar::from_bytes(buf)) return *s;
  }
}

Scalar random_nonzero_scalar(Rng& rng) {
  while (true) {
    Scalar s = random_scalar(rng);
    if (!s.is_zero()) return s;
  }
}

std::array<std::uint8_t, kScalarBytes> encode_scalar(const Scalar& s) { return s.to_bytes(); }

Scalar decode_scalar(ByteView b) {
  if (b.size() != kScalarBytes) throw Error(ErrorCode::kDecode, "scalar must be 32 bytes");
  auto s = Scalar::from_bytes(b);
  if (!s) throw Error(ErrorCode::kDecode, "non-canonical scalar");
  return *s;
}

std::string scalar_to_decimal(const Scalar& s) { return limbs_to_mpz(s.to_limbs()).get_str(10); }

Scalar scalar_from_decimal(std::string_view text) {
  mpz_class v;
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
      v.set_str(std::string(text), 10) != 0 || v >= limbs_to_mpz(bn::FrTag::kModulus)) {
    throw Error(ErrorCode::kParse, "not a scalar: " + std::string(text));
  }
  Limbs l{};
  mpz_export(l.data(), nullptr, -1, sizeof(std::uint64_t), 0, 0, v.get_mpz_t());
  return Scalar::from_limbs_unchecked(l);
}

Scalar hash_to_scalar(std::string_view domain_tag, std::span<const ByteView> parts) {
  Sha256 h;
  h.update(domain_tag);
  for (ByteView part : parts) {
    ByteWriter len;
    len.u32(static_cast<std::uint32_t>(part.size()));
    h.update(len.bytes());
    h.update(part);
  }
  Digest d = h.finish();
  return Scalar::from_bytes_reduce(d);
}

Scalar hash_to_scalar(std::string_view domain_tag, std::initializer_list<ByteView> parts) {
  return hash_to_scalar(domain_tag, std::span<const ByteView>(parts.begin(), parts.size()));
}

// ---------------------------------------------------------------------------
// G1

G1 G1::hash_to_group(std::string_view tag) {
  const bn::Fq b = bn::Fq::from_u64(5);
  for (std::uint32_t ctr = 0;; ++ctr) {
    bn::Fq x = bn::Fq::from_bytes_reduce(tagged_digest("mtkt/h2c/g1/v1", tag, ctr, 0));
    auto y = (x.square() * x + b).sqrt();
    if (!y) continue;
    if (y->is_odd()) y = -*y;
    return G1(bn::G1Point::from_affine(x, *y));
  }
}

G1 G1::pow(const Scalar& e) const {
  detail::count_group_ops(1);
  return G1(p_.mul(e.to_limbs()));
}

G1 G1::inverse() const {
  detail::count_group_ops(1);
  return G1(p_.neg());
}

G1 operator*(const G1& a, const G1& b) {
  detail::count_group_ops(1);
  return G1(a.p_.add(b.p_));
}

G1 G1::multi_pow(std::span<const G1> bases, std::span<const Scalar> exps) {
  if (bases.size() != exps.size()) throw Error(ErrorCode::kInvalidArgument, "multi_pow size mismatch");
  detail::count_group_ops(bases.size());
  std::vector<bn::G1Point> pts;
  pts.reserve(bases.size());
  for (const auto& b : bases) pts.push_back(b.p_);
  auto limbs = to_limbs(exps);
  return G1(bn::G1Point::multi_mul(pts, limbs));
}

std::array<std::uint8_t, kG1Bytes> G1::encode() const {
  std::array<std::uint8_t, kG1Bytes> out{};
  if (is_identity()) return out;
  auto [x, y] = p_.to_affine();
  out[0] = y.is_odd() ? 0x03 : 0x02;
  auto xb = x.to_bytes();
  std::copy(xb.begin(), xb.end(), out.begin() + 1);
  return out;
}

G1 G1::decode(ByteView b) {
  if (b.size() != kG1Bytes) {
    throw Error(ErrorCode::kDecode, "G1 encoding must be 33 bytes, got " + std::to_string(b.size()));
  }
  if (b[0] == 0x00) {
    if (std::all_of(b.begin() + 1, b.end(), [](std::uint8_t v) { return v == 0; })) return G1();
    throw Error(ErrorCode::kDecode, "malformed G1 identity encoding");
  }
  if (b[0] != 0x02 && b[0] != 0x03) throw Error(ErrorCode::kDecode, "bad G1 prefix byte");
  bn::Fq x = decode_fq(b.subspan(1));
  auto y = (x.square() * x + bn::Fq::from_u64(5)).sqrt();
  if (!y) throw Error(ErrorCode::kDecode, "x-coordinate not on curve");
  if (y->is_odd() != (b[0] == 0x03)) y = -*y;
  // The curve has prime order (cofactor 1): every point on it lies in G1.
  return G1(bn::G1Point::from_affine(x, *y));
}

// ---------------------------------------------------------------------------
// G2

G2 G2::hash_to_group(std::string_view tag) {
  const bn::Fq2 b = bn::CurveB<bn::Fq2>::b();
  for (std::uint32_t ctr = 0;; ++ctr) {
    bn::Fq2 x{bn::Fq::from_bytes_reduce(tagged_digest("mtkt/h2c/g2/v1", tag, ctr, 0)),
              bn::Fq::from_bytes_reduce(tagged_digest("mtkt/h2c/g2/v1", tag, ctr, 1))};
    auto y = (x.square() * x + b).sqrt();
    if (!y) continue;
    bn::G2Point p = bn::G2Point::from_affine(x, *y).mul(bn::kG2Cofactor);
    if (!p.is_identity()) return G2(p);
  }
}

G2 G2::pow(const Scalar& e) const {
  detail::count_group_ops(1);
  return G2(p_.mul(e.to_limbs()));
}

G2 G2::inverse() const {
  detail::count_group_ops(1);
  return G2(p_.neg());
}

G2 operator*(const G2& a, const G2& b) {
  detail::count_group_ops(1);
  return G2(a.p_.add(b.p_));
}

G2 G2::multi_pow(std::span<const G2> bases, std::span<const Scalar> exps) {
  if (bases.size() != exps.size()) throw Error(ErrorCode::kInvalidArgument, "multi_pow size mismatch");
  detail::count_group_ops(bases.size());
  std::vector<bn::G2Point> pts;
  pts.reserve(bases.size());
  for (const auto& b : bases) pts.push_back(b.p_);
  auto limbs = to_limbs(exps);
  return G2(bn::G2Point::multi_mul(pts, limbs));
}

std::array<std::uint8_t, kG2Bytes> G2::encode() const {
  std::array<std::uint8_t, kG2Bytes> out{};
  if (is_identity()) return out;
  auto [x, y] = p_.to_affine();
  std::size_t off = 0;
  for (const bn::Fq* f : {&x.c0, &x.c1, &y.c0, &y.c1}) {
    auto fb = f->to_bytes();
    std::copy(fb.begin(), fb.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
    off += 32;
  }
  return out;
}

G2 G2::decode(ByteView b) {
  if (b.size() != kG2Bytes) {
    throw Error(ErrorCode::kDecode, "G2 encoding must be 128 bytes, got " + std::to_string(b.size()));
  }
  if (std::all_of(b.begin(), b.end(), [](std::uint8_t v) { return v == 0; })) return G2();
  bn::Fq2 x{decode_fq(b.subspan(0, 32)), decode_fq(b.subspan(32, 32))};
  bn::Fq2 y{decode_fq(b.subspan(64, 32)), decode_fq(b.subspan(96, 32))};
  if (!bn::G2Point::on_curve(x, y)) throw Error(ErrorCode::kDecode, "G2 point not on twist curve");
  bn::G2Point p = bn::G2Point::from_affine(x, y);
  if (!p.mul(bn::FrTag::kModulus).is_identity()) {
    throw Error(ErrorCode::kDecode, "G2 point outside the order-p subgroup");
  }
  return G2(p);
}

// ---------------------------------------------------------------------------
// GT

GT GT::pow(const Scalar& e) const {
  detail::count_group_ops(1);
  return GT(v_.pow(e.to_limbs()));
}

GT operator*(const GT& a, const GT& b) {
  detail::count_group_ops(1);
  return GT(a.v_ * b.v_);
}

// ---------------------------------------------------------------------------
// Context

GroupContext::GroupContext(GroupContext&& o) noexcept
    : gens_(std::move(o.gens_)), pairing_count_(o.pairing_count_.load(std::memory_order_relaxed)) {}

GT GroupContext::pair(const G1& a, const G2& b) const {
  pairing_count_.fetch_add(1, std::memory_order_relaxed);
  return GT(bn::optimal_ate(a.point(), b.point()));
}

std::string GroupContext::field_modulus_decimal() { return limbs_to_mpz(bn::FqTag::kModulus).get_str(10); }

std::string GroupContext::group_order_decimal() { return limbs_to_mpz(bn::FrTag::kModulus).get_str(10); }

namespace {

void check_parameters() {
  const mpz_class q = limbs_to_mpz(bn::FqTag::kModulus);
  const mpz_class r = limbs_to_mpz(bn::FrTag::kModulus);
  const mpz_class u = static_cast<unsigned long>(bn::kBnU);
  const mpz_class u2 = u * u;
  const mpz_class u4 = u2 * u2;
  if (q != 36 * u4 + 36 * u2 * u + 24 * u2 + 6 * u + 1 || r != 36 * u4 + 36 * u2 * u + 18 * u2 + 6 * u + 1) {
    throw Error(ErrorCode::kInternal, "embedded BN parameters do not match u");
  }
  if (mpz_probab_prime_p(q.get_mpz_t(), 30) == 0 || mpz_probab_prime_p(r.get_mpz_t(), 30) == 0) {
    throw Error(ErrorCode::kInternal, "embedded BN moduli are not prime");
  }
}

template <class P>
void check_generator(const P& g, const char* name) {
  if (g.is_identity() || !g.point().mul(bn::FrTag::kModulus).is_identity()) {
    throw Error(ErrorCode::kInternal, std::string("generator ") + name + " does not have order p");
  }
}

}  // namespace

GroupContext default_context() {
  static const std::shared_ptr<const Generators> gens = [] {
    check_parameters();
    auto g = std::make_shared<Generators>();
    g->g = G1::hash_to_group("gen:g");
    g->g0 = G1::hash_to_group("gen:g0");
    g->g1 = G1::hash_to_group("gen:g1");
    g->gt = G1::hash_to_group("gen:gt");
    g->gT = G1::hash_to_group("gen:gT");
    g->gU = G1::hash_to_group("gen:gU");
    g->h = G1::hash_to_group("gen:h");
    g->G = G1::hash_to_group("gen:G");
    g->H = G1::hash_to_group("gen:H");
    g->g2 = G2::hash_to_group("gen:g2");
    g->g3 = G2::hash_to_group("gen:g3");
    const std::pair<const G1*, const char*> g1s[] = {{&g->g, "g"},   {&g->g0, "g0"}, {&g->g1, "g1"},
                                                     {&g->gt, "gt"}, {&g->gT, "gT"}, {&g->gU, "gU"},
                                                     {&g->h, "h"},   {&g->G, "G"},   {&g->H, "H"}};
    for (auto [p, name] : g1s) check_generator(*p, name);
    check_generator(g->g2, "g2");
    check_generator(g->g3, "g3");
    return std::shared_ptr<const Generators>(std::move(g));
  }();
  return GroupContext(gens);
}

}  // namespace mtkt
