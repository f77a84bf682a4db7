#include "mtkt/rsa.hpp"

#include "mtkt/error.hpp"
#include "mtkt/sha256.hpp"

namespace mtkt {

namespace {

constexpr std::uint8_t kSha256DigestInfo[] = {0x30, 0x31, 0x30, 0x0d, 0x06, 0x09, 0x60, 0x86, 0x48, 0x01,
                                              0x65, 0x03, 0x04, 0x02, 0x01, 0x05, 0x00, 0x04, 0x20};

mpz_class prime_with_top_bits(Rng& rng, std::size_t bits) {
  while (true) {
    mpz_class v = random_bits(rng, bits);
    mpz_setbit(v.get_mpz_t(), bits - 1);
    mpz_setbit(v.get_mpz_t(), bits - 2);
    mpz_class p;
    mpz_nextprime(p.get_mpz_t(), v.get_mpz_t());
    if (mpz_sizeinbase(p.get_mpz_t(), 2) != bits) continue;
    mpz_class g, pm1 = p - 1;
    mpz_gcd_ui(g.get_mpz_t(), pm1.get_mpz_t(), kRsaExponent);
    if (g == 1) return p;
  }
}

}  // namespace

void RsaPublicKey::require_validator_shape() const {
  if (bits() != kValidatorRsaBits) {
    throw Error(ErrorCode::kInvalidArgument, "validator RSA modulus must be 1984 bits, got " + std::to_string(bits()));
  }
  if (e != kRsaExponent) throw Error(ErrorCode::kInvalidArgument, "validator RSA exponent must be 65537");
}

Bytes RsaPublicKey::serialize() const {
  ByteWriter w;
  write_mpz(w, n);
  write_mpz(w, e);
  return std::move(w).take();
}

RsaPublicKey RsaPublicKey::deserialize(ByteView b) {
  ByteReader r(b);
  RsaPublicKey k;
  k.n = read_mpz(r);
  k.e = read_mpz(r);
  r.expect_done();
  return k;
}

RsaKeyPair RsaKeyPair::generate(Rng& rng, std::size_t bits) {
  if (bits < 512 || bits % 2 != 0) throw Error(ErrorCode::kInvalidArgument, "unsupported RSA size");
  while (true) {
    mpz_class p = prime_with_top_bits(rng, bits / 2);
    mpz_class q = prime_with_top_bits(rng, bits / 2);
    if (p == q) continue;
    RsaKeyPair k;
    k.pub.n = p * q;
    k.pub.e = kRsaExponent;
    k.p = p;
    k.q = q;
    mpz_class phi = (p - 1) * (q - 1);
    mpz_invert(k.d.get_mpz_t(), k.pub.e.get_mpz_t(), phi.get_mpz_t());
    return k;
  }
}

Bytes RsaKeyPair::serialize() const {
  ByteWriter w;
  write_mpz(w, pub.n);
  write_mpz(w, pub.e);
  write_mpz(w, d);
  write_mpz(w, p);
  write_mpz(w, q);
  return std::move(w).take();
}

RsaKeyPair RsaKeyPair::deserialize(ByteView b) {
  ByteReader r(b);
  RsaKeyPair k;
  k.pub.n = read_mpz(r);
  k.pub.e = read_mpz(r);
  k.d = read_mpz(r);
  k.p = read_mpz(r);
  k.q = read_mpz(r);
  r.expect_done();
  if (k.p * k.q != k.pub.n) throw Error(ErrorCode::kDecode, "RSA factors do not match modulus");
  return k;
}

Bytes pkcs1_v15_sha256_encode(ByteView msg, std::size_t k) {
  Digest h = Sha256::hash(msg);
  std::size_t t_len = sizeof(kSha256DigestInfo) + h.size();
  if (k < t_len + 11) throw Error(ErrorCode::kInvalidArgument, "RSA modulus too short for SHA-256");
  Bytes em{0x00, 0x01};
  em.insert(em.end(), k - t_len - 3, 0xff);
  em.push_back(0x00);
  append(em, kSha256DigestInfo);
  append(em, h);
  return em;
}

Bytes rsa_sign(const RsaKeyPair& key, ByteView msg) {
  std::size_t k = key.pub.byte_length();
  mpz_class m = mpz_from_bytes(pkcs1_v15_sha256_encode(msg, k));
  // CRT
  mpz_class dp = key.d % (key.p - 1), dq = key.d % (key.q - 1), qinv, sp, sq;
  mpz_invert(qinv.get_mpz_t(), key.q.get_mpz_t(), key.p.get_mpz_t());
  mpz_powm(sp.get_mpz_t(), m.get_mpz_t(), dp.get_mpz_t(), key.p.get_mpz_t());
  mpz_powm(sq.get_mpz_t(), m.get_mpz_t(), dq.get_mpz_t(), key.q.get_mpz_t());
  mpz_class h = (sp - sq) * qinv % key.p;
  if (h < 0) h += key.p;
  mpz_class s = sq + h * key.q;
  return mpz_to_fixed(s, k);
}

bool rsa_verify(const RsaPublicKey& pub, ByteView msg, ByteView sig) {
  std::size_t k = pub.byte_length();
  if (sig.size() != k) return false;
  mpz_class s = mpz_from_bytes(sig);
  if (s >= pub.n) return false;
  mpz_class m;
  mpz_powm(m.get_mpz_t(), s.get_mpz_t(), pub.e.get_mpz_t(), pub.n.get_mpz_t());
  return mpz_to_fixed(m, k) == pkcs1_v15_sha256_encode(msg, k);
}

}  // namespace mtkt
