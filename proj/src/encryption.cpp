#include "mtkt/encryption.hpp"

#include <algorithm>
#include <set>

#include "mtkt/error.hpp"
#include "mtkt/sha256.hpp"

namespace mtkt {

namespace {

void check_threshold(std::uint32_t t, std::uint32_t n) {
  if (t < 1 || t > n) throw Error(ErrorCode::kInvalidArgument, "threshold must satisfy 1 <= t <= n");
}

// Keeps the first partial per index and requires t of them.
template <class Partial>
std::vector<Partial> distinct_quorum(std::span<const Partial> partials) {
  if (partials.empty()) throw Error(ErrorCode::kInsufficientShares, "no shares");
  std::uint32_t t = partials.front().t;
  std::set<std::uint32_t> seen;
  std::vector<Partial> out;
  for (const auto& p : partials) {
    if (p.t != t) throw Error(ErrorCode::kInvalidArgument, "shares from different dealings");
    if (seen.insert(p.index).second) out.push_back(p);
  }
  if (out.size() < t) {
    throw Error(ErrorCode::kInsufficientShares,
                std::to_string(out.size()) + " distinct shares, threshold is " + std::to_string(t));
  }
  out.resize(t);
  return out;
}

std::vector<std::uint32_t> indices_of(auto const& parts) {
  std::vector<std::uint32_t> idx;
  for (const auto& p : parts) idx.push_back(p.index);
  return idx;
}

mpz_class factorial(std::uint32_t n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return f;
}

// delta * prod_{j != i} j / (j - i), exact over the integers.
mpz_class integer_lagrange(std::span<const std::uint32_t> indices, std::size_t at, const mpz_class& delta) {
  mpz_class num = delta, den = 1;
  const long xi = indices[at];
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (j == at) continue;
    num *= static_cast<long>(indices[j]);
    den *= static_cast<long>(indices[j]) - xi;
  }
  mpz_class q;
  mpz_divexact(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}

// Signed exponent: negative exponents go through the inverse.
mpz_class powm_signed(const mpz_class& base, const mpz_class& e, const mpz_class& mod) {
  mpz_class out;
  if (e >= 0) {
    mpz_powm(out.get_mpz_t(), base.get_mpz_t(), e.get_mpz_t(), mod.get_mpz_t());
  } else {
    mpz_class inv, neg = -e;
    if (mpz_invert(inv.get_mpz_t(), base.get_mpz_t(), mod.get_mpz_t()) == 0) {
      throw Error(ErrorCode::kInvalidArgument, "partial decryption not invertible");
    }
    mpz_powm(out.get_mpz_t(), inv.get_mpz_t(), neg.get_mpz_t(), mod.get_mpz_t());
  }
  return out;
}

mpz_class powm(const mpz_class& base, const mpz_class& e, const mpz_class& mod) {
  mpz_class out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), e.get_mpz_t(), mod.get_mpz_t());
  return out;
}

// (1 + n)^m mod n^2 = 1 + m n
mpz_class g_pow(const PaillierPublicKey& pk, const mpz_class& m) {
  mpz_class e = m % pk.n;
  if (e < 0) e += pk.n;
  return (1 + e * pk.n) % pk.n2;
}

mpz_class paillier_L(const PaillierPublicKey& pk, const mpz_class& u) { return (u - 1) / pk.n; }

bool is_unit(const mpz_class& v, const mpz_class& mod) {
  if (v <= 0 || v >= mod) return false;
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), v.get_mpz_t(), mod.get_mpz_t());
  return g == 1;
}

mpz_class random_prime(Rng& rng, std::size_t bits) {
  mpz_class v = random_bits(rng, bits);
  mpz_setbit(v.get_mpz_t(), bits - 1);
  mpz_setbit(v.get_mpz_t(), bits - 2);
  mpz_class p;
  mpz_nextprime(p.get_mpz_t(), v.get_mpz_t());
  return p;
}

}  // namespace

// ---- Shamir -------------------------------------------------------------------

Bytes ScalarShare::serialize() const {
  ByteWriter w;
  w.u32(index);
  w.raw(encode_scalar(value));
  w.u32(t);
  w.u32(n);
  return std::move(w).take();
}

ScalarShare ScalarShare::deserialize(ByteView b) {
  ByteReader r(b);
  ScalarShare s;
  s.index = r.u32();
  s.value = decode_scalar(r.raw(kScalarBytes));
  s.t = r.u32();
  s.n = r.u32();
  r.expect_done();
  check_threshold(s.t, s.n);
  if (s.index < 1 || s.index > s.n) throw Error(ErrorCode::kDecode, "share index out of range");
  return s;
}

std::vector<ScalarShare> shamir_share(const Scalar& secret, std::uint32_t t, std::uint32_t n, Rng& rng) {
  check_threshold(t, n);
  std::vector<Scalar> coeffs{secret};
  for (std::uint32_t i = 1; i < t; ++i) coeffs.push_back(random_scalar(rng));
  std::vector<ScalarShare> out;
  for (std::uint32_t i = 1; i <= n; ++i) {
    Scalar x = Scalar::from_u64(i), acc = Scalar::zero();
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    out.push_back({i, acc, t, n});
  }
  return out;
}

Scalar lagrange_at_zero(std::span<const std::uint32_t> indices, std::size_t at) {
  Scalar num = Scalar::one(), den = Scalar::one();
  Scalar xi = Scalar::from_u64(indices[at]);
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (j == at) continue;
    Scalar xj = Scalar::from_u64(indices[j]);
    num = num * xj;
    den = den * (xj - xi);
  }
  return num * den.inverse();
}

Scalar shamir_reconstruct(std::span<const ScalarShare> shares) {
  auto quorum = distinct_quorum(shares);
  auto idx = indices_of(quorum);
  Scalar acc = Scalar::zero();
  for (std::size_t i = 0; i < quorum.size(); ++i) acc = acc + quorum[i].value * lagrange_at_zero(idx, i);
  return acc;
}

// ---- ElGamal ------------------------------------------------------------------

Bytes ElGamalCiphertext::serialize() const {
  Bytes out;
  append(out, C1.encode());
  append(out, C2.encode());
  return out;
}

ElGamalCiphertext ElGamalCiphertext::deserialize(ByteView b) {
  if (b.size() != 2 * kG1Bytes) throw Error(ErrorCode::kDecode, "ElGamal ciphertext must be 66 bytes");
  return {G1::decode(b.subspan(0, kG1Bytes)), G1::decode(b.subspan(kG1Bytes))};
}

ElGamalKeys ElGamalKeys::generate(const GroupContext& ctx, std::uint32_t t, std::uint32_t n, Rng& rng) {
  check_threshold(t, n);
  ElGamalKeys k;
  k.xT = random_nonzero_scalar(rng);
  k.hT = ctx.gens().gT.pow(k.xT);
  k.shares = shamir_share(k.xT, t, n, rng);
  return k;
}

ElGamalCiphertext elgamal_encrypt(const GroupContext& ctx, const G1& hT, const G1& m, const Scalar& r) {
  return {ctx.gens().gT.pow(r), m * hT.pow(r)};
}

G1 elgamal_decrypt(const Scalar& xT, const ElGamalCiphertext& ct) { return ct.C2 / ct.C1.pow(xT); }

ElGamalCiphertext elgamal_rerandomize(const GroupContext& ctx, const G1& hT, const ElGamalCiphertext& ct,
                                      const Scalar& r) {
  return {ct.C1 * ctx.gens().gT.pow(r), ct.C2 * hT.pow(r)};
}

ElGamalPartial elgamal_partial_decrypt(const ScalarShare& share, const ElGamalCiphertext& ct) {
  return {share.index, share.t, ct.C1.pow(share.value)};
}

G1 detail::elgamal_combine_unchecked(const ElGamalCiphertext& ct, std::span<const ElGamalPartial> partials) {
  auto idx = indices_of(partials);
  std::vector<G1> bases;
  std::vector<Scalar> exps;
  for (std::size_t i = 0; i < partials.size(); ++i) {
    bases.push_back(partials[i].value);
    exps.push_back(lagrange_at_zero(idx, i));
  }
  return ct.C2 / G1::multi_pow(bases, exps);
}

G1 elgamal_combine(const ElGamalCiphertext& ct, std::span<const ElGamalPartial> partials) {
  auto quorum = distinct_quorum(partials);
  return detail::elgamal_combine_unchecked(ct, quorum);
}

// ---- Paillier -----------------------------------------------------------------

PaillierPublicKey PaillierPublicKey::from_modulus(const mpz_class& n) {
  if (n <= 3 || mpz_even_p(n.get_mpz_t())) throw Error(ErrorCode::kInvalidArgument, "bad Paillier modulus");
  return {n, n * n, n + 1};
}

Bytes PaillierPublicKey::serialize() const {
  ByteWriter w;
  write_mpz(w, n);
  return std::move(w).take();
}

PaillierPublicKey PaillierPublicKey::deserialize(ByteView b) {
  ByteReader r(b);
  mpz_class n = read_mpz(r);
  r.expect_done();
  return from_modulus(n);
}

PaillierKeyPair PaillierKeyPair::generate(Rng& rng, std::size_t bits) {
  if (bits < kMinPaillierBits) {
    throw Error(ErrorCode::kInvalidArgument, "Paillier modulus must be at least 2048 bits");
  }
  return generate_unchecked(rng, bits);
}

PaillierKeyPair PaillierKeyPair::generate_unchecked(Rng& rng, std::size_t bits) {
  if (bits < 64 || bits % 2 != 0) throw Error(ErrorCode::kInvalidArgument, "modulus size must be even");
  while (true) {
    mpz_class a = random_prime(rng, bits / 2);
    mpz_class b = random_prime(rng, bits / 2);
    if (a == b) continue;
    mpz_class n = a * b;
    if (mpz_sizeinbase(n.get_mpz_t(), 2) != bits) continue;
    mpz_class phi = (a - 1) * (b - 1), g;
    mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), phi.get_mpz_t());
    if (g != 1) continue;
    PaillierKeyPair kp;
    kp.pk = PaillierPublicKey::from_modulus(n);
    kp.sk.a = a;
    kp.sk.b = b;
    mpz_lcm(kp.sk.lambda.get_mpz_t(), mpz_class(a - 1).get_mpz_t(), mpz_class(b - 1).get_mpz_t());
    mpz_invert(kp.sk.mu.get_mpz_t(), kp.sk.lambda.get_mpz_t(), n.get_mpz_t());
    return kp;
  }
}

PaillierCiphertext paillier_encrypt(const PaillierPublicKey& pk, const mpz_class& m, const mpz_class& j) {
  if (m < 0 || m >= pk.n) throw Error(ErrorCode::kInvalidArgument, "Paillier plaintext out of range");
  if (!is_unit(j, pk.n)) throw Error(ErrorCode::kInvalidArgument, "Paillier randomness not a unit mod n");
  return {g_pow(pk, m) * powm(j, pk.n, pk.n2) % pk.n2};
}

mpz_class paillier_random_unit(const PaillierPublicKey& pk, Rng& rng) {
  while (true) {
    mpz_class j = random_below(rng, pk.n);
    if (is_unit(j, pk.n)) return j;
  }
}

mpz_class paillier_decrypt(const PaillierPublicKey& pk, const PaillierSecretKey& sk, const PaillierCiphertext& c) {
  if (!is_unit(c.value, pk.n2)) throw Error(ErrorCode::kInvalidArgument, "ciphertext not in Z*_{n^2}");
  return paillier_L(pk, powm(c.value, sk.lambda, pk.n2)) * sk.mu % pk.n;
}

Bytes PaillierShare::serialize() const {
  ByteWriter w;
  w.u32(index);
  write_mpz(w, value);
  w.u32(t);
  w.u32(n);
  return std::move(w).take();
}

PaillierShare PaillierShare::deserialize(ByteView b) {
  ByteReader r(b);
  PaillierShare s;
  s.index = r.u32();
  s.value = read_mpz(r);
  s.t = r.u32();
  s.n = r.u32();
  r.expect_done();
  check_threshold(s.t, s.n);
  if (s.index < 1 || s.index > s.n) throw Error(ErrorCode::kDecode, "share index out of range");
  return s;
}

std::vector<PaillierShare> paillier_share(const PaillierKeyPair& key, std::uint32_t t, std::uint32_t n, Rng& rng) {
  check_threshold(t, n);
  const mpz_class& N = key.pk.n;
  const mpz_class& lambda = key.sk.lambda;
  mpz_class modulus = N * lambda;
  // d = lambda * (lambda^-1 mod N): 0 mod lambda, 1 mod N
  mpz_class d = lambda * key.sk.mu % modulus;
  std::vector<mpz_class> coeffs{d};
  for (std::uint32_t i = 1; i < t; ++i) coeffs.push_back(random_below(rng, modulus));
  std::vector<PaillierShare> out;
  for (std::uint32_t i = 1; i <= n; ++i) {
    mpz_class acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = (acc * i + *it) % modulus;
    out.push_back({i, acc, t, n});
  }
  return out;
}

PaillierPartial paillier_partial_decrypt(const PaillierPublicKey& pk, const PaillierShare& share,
                                         const PaillierCiphertext& c) {
  if (!is_unit(c.value, pk.n2)) throw Error(ErrorCode::kInvalidArgument, "ciphertext not in Z*_{n^2}");
  return {share.index, share.t, share.n, powm(c.value, share.value, pk.n2)};
}

mpz_class detail::paillier_combine_unchecked(const PaillierPublicKey& pk, std::span<const PaillierPartial> partials) {
  if (partials.empty()) throw Error(ErrorCode::kInsufficientShares, "no shares");
  auto idx = indices_of(partials);
  mpz_class delta = factorial(partials.front().n);
  mpz_class acc = 1;
  for (std::size_t i = 0; i < partials.size(); ++i) {
    acc = acc * powm_signed(partials[i].value, integer_lagrange(idx, i, delta), pk.n2) % pk.n2;
  }
  // acc = (1 + n)^(delta m)
  mpz_class delta_inv;
  mpz_invert(delta_inv.get_mpz_t(), delta.get_mpz_t(), pk.n.get_mpz_t());
  return paillier_L(pk, acc) * delta_inv % pk.n;
}

mpz_class paillier_combine(const PaillierPublicKey& pk, std::span<const PaillierPartial> partials) {
  auto quorum = distinct_quorum(partials);
  return detail::paillier_combine_unchecked(pk, quorum);
}

// ---- Pi1 ------------------------------------------------------------------------

Bytes PaillierPedersenProof::serialize() const {
  ByteWriter w;
  w.raw(u1.encode());
  write_mpz(w, u2);
  write_mpz(w, c);
  write_mpz(w, z_m);
  write_mpz(w, z_j);
  return std::move(w).take();
}

PaillierPedersenProof PaillierPedersenProof::deserialize(ByteView b) {
  ByteReader r(b);
  PaillierPedersenProof p;
  p.u1 = G1::decode(r.raw(kG1Bytes));
  p.u2 = read_mpz(r);
  p.c = read_mpz(r);
  p.z_m = read_mpz(r);
  p.z_j = read_mpz(r);
  r.expect_done();
  return p;
}

mpz_class detail::pi1_challenge(const PaillierPublicKey& pk, const G1& com, const PaillierCiphertext& c0,
                                const G1& u1, const mpz_class& u2) {
  ByteWriter w;
  w.str("mtkt/pi1/v1");
  w.blob(com.encode());
  w.blob(mpz_to_bytes(c0.value));
  w.blob(u1.encode());
  w.blob(mpz_to_bytes(u2));
  w.blob(mpz_to_bytes(pk.n));
  Digest d = Sha256::hash(w.bytes());
  return mpz_from_bytes(ByteView(d).first(kPi1ChallengeBits / 8));
}

PaillierPedersenProof pi1_prove(const GroupContext& ctx, const PaillierPublicKey& pk, const Scalar& s1,
                                const mpz_class& j, const G1& com, const PaillierCiphertext& c0, Rng& rng) {
  const G1& g1 = ctx.gens().g1;
  mpz_class s = scalar_to_mpz(s1);
  if (com != g1.pow(s1) || paillier_encrypt(pk, s, j) != c0) {
    throw Error(ErrorCode::kWitnessMismatch, "Com and C0 do not open to the same s1");
  }
  mpz_class m_r = random_bits(rng, kPi1MaskBits);
  mpz_class j_r = paillier_random_unit(pk, rng);
  PaillierPedersenProof p;
  p.u1 = g1.pow(scalar_from_mpz(m_r));
  p.u2 = g_pow(pk, m_r) * powm(j_r, pk.n, pk.n2) % pk.n2;
  p.c = detail::pi1_challenge(pk, com, c0, p.u1, p.u2);
  p.z_m = m_r + p.c * s;
  p.z_j = j_r * powm(j, p.c, pk.n) % pk.n;
  return p;
}

bool pi1_verify(const GroupContext& ctx, const PaillierPublicKey& pk, const G1& com, const PaillierCiphertext& c0,
                const PaillierPedersenProof& proof) {
  if (proof.z_m < 0 || mpz_sizeinbase(proof.z_m.get_mpz_t(), 2) > kPi1MaskBits + 1) return false;
  if (!is_unit(proof.z_j, pk.n) || !is_unit(proof.u2, pk.n2) || !is_unit(c0.value, pk.n2)) return false;
  if (proof.c != detail::pi1_challenge(pk, com, c0, proof.u1, proof.u2)) return false;
  const G1& g1 = ctx.gens().g1;
  Scalar c = scalar_from_mpz(proof.c);
  if (g1.pow(scalar_from_mpz(proof.z_m)) != proof.u1 * com.pow(c)) return false;
  mpz_class lhs = g_pow(pk, proof.z_m) * powm(proof.z_j, pk.n, pk.n2) % pk.n2;
  mpz_class rhs = proof.u2 * powm(c0.value, proof.c, pk.n2) % pk.n2;
  return lhs == rhs;
}

}  // namespace mtkt
