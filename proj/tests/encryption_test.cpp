#include <gtest/gtest.h>

#include "mtkt/encryption.hpp"
#include "mtkt/error.hpp"
#include "test_util.hpp"

using namespace mtkt;
using mtkt::testing::sc;

namespace {

const GroupContext& ctx() {
  static const GroupContext c = default_context();
  return c;
}

// All size-k subsets of [0, n).
std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(i);
    out.push_back(s);
  }
  return out;
}

template <class T>
std::vector<T> pick(const std::vector<T>& all, const std::vector<std::size_t>& which) {
  std::vector<T> out;
  for (auto i : which) out.push_back(all[i]);
  return out;
}

// Small modulus for the tests that need many runs; the 2048-bit key is
// exercised separately.
const PaillierKeyPair& small_paillier() {
  static const PaillierKeyPair k = [] {
    Rng rng(77);
    return PaillierKeyPair::generate_unchecked(rng, 768);
  }();
  return k;
}

const PaillierKeyPair& full_paillier() {
  static const PaillierKeyPair k = [] {
    Rng rng(78);
    return PaillierKeyPair::generate(rng);
  }();
  return k;
}

constexpr std::pair<std::uint32_t, std::uint32_t> kThresholds[] = {{1, 1}, {2, 3}, {3, 5}};

}  // namespace

TEST(ElGamal, RoundTripAndRandomization) {
  Rng rng(1);
  auto keys = ElGamalKeys::generate(ctx(), 2, 3, rng);
  EXPECT_EQ(keys.hT, ctx().gens().gT.pow(keys.xT));
  G1 m = ctx().gens().g1.pow(random_scalar(rng));
  auto a = elgamal_encrypt(ctx(), keys.hT, m, sc(5));
  auto b = elgamal_encrypt(ctx(), keys.hT, m, sc(6));
  EXPECT_EQ(elgamal_decrypt(keys.xT, a), m);
  EXPECT_EQ(elgamal_decrypt(keys.xT, b), m);
  EXPECT_NE(a, b);
  EXPECT_NE(a.C1, b.C1);
  EXPECT_NE(a.C2, b.C2);
}

TEST(ElGamal, RerandomizationIsHomomorphic) {
  Rng rng(2);
  auto keys = ElGamalKeys::generate(ctx(), 1, 1, rng);
  G1 m = ctx().gens().g1.pow(random_scalar(rng));
  for (int i = 0; i < 10; ++i) {
    Scalar r1 = random_scalar(rng), r2 = random_scalar(rng);
    auto direct = elgamal_encrypt(ctx(), keys.hT, m, r1 + r2);
    auto rerand = elgamal_rerandomize(ctx(), keys.hT, elgamal_encrypt(ctx(), keys.hT, m, r1), r2);
    EXPECT_EQ(direct, rerand);
  }
}

TEST(ElGamal, Serialization) {
  Rng rng(3);
  auto keys = ElGamalKeys::generate(ctx(), 1, 1, rng);
  auto ct = elgamal_encrypt(ctx(), keys.hT, ctx().gens().g1, random_scalar(rng));
  Bytes b = ct.serialize();
  ASSERT_EQ(b.size(), 66u);
  EXPECT_EQ(ElGamalCiphertext::deserialize(b), ct);
  b.pop_back();
  EXPECT_THROW(ElGamalCiphertext::deserialize(b), Error);
}

TEST(Shamir, RejectsBadThreshold) {
  Rng rng(4);
  EXPECT_THROW(shamir_share(sc(1), 0, 3, rng), Error);
  EXPECT_THROW(shamir_share(sc(1), 4, 3, rng), Error);
}

TEST(Shamir, TwoOfThree) {
  Rng rng(5);
  Scalar secret = random_scalar(rng);
  auto shares = shamir_share(secret, 2, 3, rng);
  ASSERT_EQ(shares.size(), 3u);
  EXPECT_EQ(shamir_reconstruct(pick(shares, {0, 2})), secret);
  try {
    shamir_reconstruct(pick(shares, {1}));
    FAIL() << "one share reconstructed";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientShares);
  }
  // a repeated share does not count twice
  EXPECT_THROW(shamir_reconstruct(pick(shares, {1, 1})), Error);
}

TEST(Shamir, ShareSerialization) {
  Rng rng(6);
  auto shares = shamir_share(random_scalar(rng), 3, 5, rng);
  for (const auto& s : shares) EXPECT_EQ(ScalarShare::deserialize(s.serialize()), s);
  Bytes bad = shares[0].serialize();
  bad[3] = 9;  // index 9 of 5
  EXPECT_THROW(ScalarShare::deserialize(bad), Error);
}

TEST(Shamir, LagrangeAgainstPlainFractions) {
  // indices {1, 3}: coefficients 3/2 and -1/2
  std::vector<std::uint32_t> idx{1, 3};
  Scalar half = sc(2).inverse();
  EXPECT_EQ(lagrange_at_zero(idx, 0), sc(3) * half);
  EXPECT_EQ(lagrange_at_zero(idx, 1), -half);
}

TEST(ThresholdElGamal, AllMinimalSubsetsAgreeWithDirectKey) {
  Rng rng(7);
  for (auto [t, n] : kThresholds) {
    auto keys = ElGamalKeys::generate(ctx(), t, n, rng);
    G1 m = ctx().gens().g1.pow(random_scalar(rng));
    auto ct = elgamal_encrypt(ctx(), keys.hT, m, random_scalar(rng));
    G1 direct = elgamal_decrypt(keys.xT, ct);
    ASSERT_EQ(direct, m);
    std::vector<ElGamalPartial> partials;
    for (const auto& s : keys.shares) partials.push_back(elgamal_partial_decrypt(s, ct));
    for (const auto& sub : subsets(n, t)) {
      EXPECT_EQ(elgamal_combine(ct, pick(partials, sub)), direct) << t << "-of-" << n;
    }
    if (t == 1) continue;
    for (const auto& sub : subsets(n, t - 1)) {
      auto few = pick(partials, sub);
      EXPECT_THROW(elgamal_combine(ct, few), Error);
      EXPECT_NE(detail::elgamal_combine_unchecked(ct, few), m);
    }
  }
}

TEST(Paillier, KeyShapeAndDeterminism) {
  const auto& k = full_paillier();
  EXPECT_EQ(k.pk.bits(), 2048u);
  EXPECT_EQ(mpz_sizeinbase(k.sk.a.get_mpz_t(), 2), mpz_sizeinbase(k.sk.b.get_mpz_t(), 2));
  EXPECT_EQ(k.pk.g, k.pk.n + 1);
  mpz_class phi = (k.sk.a - 1) * (k.sk.b - 1), g;
  mpz_gcd(g.get_mpz_t(), k.pk.n.get_mpz_t(), phi.get_mpz_t());
  EXPECT_EQ(g, 1);
  Rng again(78);
  EXPECT_EQ(PaillierKeyPair::generate(again).pk.n, k.pk.n);
  EXPECT_EQ(PaillierPublicKey::deserialize(k.pk.serialize()), k.pk);

  Rng rng(8);
  EXPECT_THROW(PaillierKeyPair::generate(rng, 1024), Error);
}

TEST(Paillier, RoundTrip) {
  const auto& k = full_paillier();
  Rng rng(9);
  EXPECT_EQ(paillier_decrypt(k.pk, k.sk, paillier_encrypt(k.pk, 0, paillier_random_unit(k.pk, rng))), 0);
  for (int i = 0; i < 5; ++i) {
    mpz_class m = scalar_to_mpz(random_scalar(rng));
    auto c = paillier_encrypt(k.pk, m, paillier_random_unit(k.pk, rng));
    EXPECT_EQ(paillier_decrypt(k.pk, k.sk, c), m);
  }
}

TEST(Paillier, BinomialIdentity) {
  const auto& k = small_paillier();
  Rng rng(10);
  for (int i = 0; i < 20; ++i) {
    mpz_class m = random_below(rng, k.pk.n), direct;
    mpz_powm(direct.get_mpz_t(), k.pk.g.get_mpz_t(), m.get_mpz_t(), k.pk.n2.get_mpz_t());
    EXPECT_EQ(direct, (1 + m * k.pk.n) % k.pk.n2);
    auto c = paillier_encrypt(k.pk, m, 1);
    EXPECT_EQ(c.value, direct);
    EXPECT_EQ(paillier_decrypt(k.pk, k.sk, c), m);
  }
}

TEST(Paillier, RejectsBadInputs) {
  const auto& k = small_paillier();
  EXPECT_THROW(paillier_encrypt(k.pk, 1, k.sk.a), Error);
  EXPECT_THROW(paillier_encrypt(k.pk, 1, 0), Error);
  EXPECT_THROW(paillier_encrypt(k.pk, k.pk.n, 1), Error);
  EXPECT_THROW(paillier_encrypt(k.pk, -1, 1), Error);
}

TEST(Paillier, Homomorphic) {
  const auto& k = small_paillier();
  Rng rng(11);
  mpz_class a = 1234567, b = 7654321;
  auto ca = paillier_encrypt(k.pk, a, paillier_random_unit(k.pk, rng));
  auto cb = paillier_encrypt(k.pk, b, paillier_random_unit(k.pk, rng));
  EXPECT_EQ(paillier_decrypt(k.pk, k.sk, {ca.value * cb.value % k.pk.n2}), a + b);
}

TEST(ThresholdPaillier, AllMinimalSubsetsAgreeWithDirectKey) {
  const auto& k = small_paillier();
  Rng rng(12);
  for (auto [t, n] : kThresholds) {
    auto shares = paillier_share(k, t, n, rng);
    mpz_class m = scalar_to_mpz(random_scalar(rng));
    auto c = paillier_encrypt(k.pk, m, paillier_random_unit(k.pk, rng));
    std::vector<PaillierPartial> partials;
    for (const auto& s : shares) partials.push_back(paillier_partial_decrypt(k.pk, s, c));
    for (const auto& sub : subsets(n, t)) {
      EXPECT_EQ(paillier_combine(k.pk, pick(partials, sub)), m) << t << "-of-" << n;
    }
    if (t == 1) continue;
    for (const auto& sub : subsets(n, t - 1)) {
      auto few = pick(partials, sub);
      try {
        paillier_combine(k.pk, few);
        ADD_FAILURE() << "combined below threshold";
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kInsufficientShares);
      }
      EXPECT_NE(detail::paillier_combine_unchecked(k.pk, few), m);
    }
  }
}

TEST(ThresholdPaillier, FullSizeKey) {
  const auto& k = full_paillier();
  Rng rng(13);
  auto shares = paillier_share(k, 2, 3, rng);
  mpz_class m = scalar_to_mpz(random_scalar(rng));
  auto c = paillier_encrypt(k.pk, m, paillier_random_unit(k.pk, rng));
  std::vector<PaillierPartial> partials{paillier_partial_decrypt(k.pk, shares[2], c),
                                        paillier_partial_decrypt(k.pk, shares[0], c)};
  EXPECT_EQ(paillier_combine(k.pk, partials), m);
  for (const auto& s : shares) {
    auto back = PaillierShare::deserialize(s.serialize());
    EXPECT_EQ(back.value, s.value);
    EXPECT_EQ(back.index, s.index);
  }
}

namespace {

struct Pi1World {
  Scalar s1;
  mpz_class j;
  G1 com;
  PaillierCiphertext c0;
};

Pi1World pi1_world(const PaillierPublicKey& pk, Rng& rng) {
  Pi1World w;
  w.s1 = random_scalar(rng);
  w.j = paillier_random_unit(pk, rng);
  w.com = ctx().gens().g1.pow(w.s1);
  w.c0 = paillier_encrypt(pk, scalar_to_mpz(w.s1), w.j);
  return w;
}

}  // namespace

TEST(Pi1, HonestProofVerifies) {
  const auto& k = full_paillier();
  Rng rng(14);
  auto w = pi1_world(k.pk, rng);
  auto proof = pi1_prove(ctx(), k.pk, w.s1, w.j, w.com, w.c0, rng);
  EXPECT_TRUE(pi1_verify(ctx(), k.pk, w.com, w.c0, proof));
  auto back = PaillierPedersenProof::deserialize(proof.serialize());
  EXPECT_EQ(back, proof);
  EXPECT_TRUE(pi1_verify(ctx(), k.pk, w.com, w.c0, back));
  EXPECT_LE(mpz_sizeinbase(proof.c.get_mpz_t(), 2), kPi1ChallengeBits);
}

TEST(Pi1, ProverRefusesMismatchedWitness) {
  const auto& k = small_paillier();
  Rng rng(15);
  auto w = pi1_world(k.pk, rng);
  auto other = paillier_encrypt(k.pk, scalar_to_mpz(w.s1 + sc(1)), w.j);
  try {
    pi1_prove(ctx(), k.pk, w.s1, w.j, w.com, other, rng);
    FAIL() << "proved a false statement";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWitnessMismatch);
  }
}

TEST(Pi1, CrossBindingRejected) {
  // A prover following the protocol for Com on s1 and C0 on s1 + 1 cannot
  // satisfy both equations with one z_m.
  const auto& k = small_paillier();
  Rng rng(16);
  auto w = pi1_world(k.pk, rng);
  mpz_class s = scalar_to_mpz(w.s1);
  auto bad_c0 = paillier_encrypt(k.pk, s + 1, w.j);
  const auto& pk = k.pk;
  for (mpz_class claimed : {s, mpz_class(s + 1)}) {
    mpz_class m_r = random_bits(rng, kPi1MaskBits), j_r = paillier_random_unit(pk, rng), jn;
    mpz_powm(jn.get_mpz_t(), j_r.get_mpz_t(), pk.n.get_mpz_t(), pk.n2.get_mpz_t());
    PaillierPedersenProof p;
    p.u1 = ctx().gens().g1.pow(scalar_from_mpz(m_r));
    p.u2 = (1 + m_r * pk.n) * jn % pk.n2;
    p.c = detail::pi1_challenge(pk, w.com, bad_c0, p.u1, p.u2);
    p.z_m = m_r + p.c * claimed;
    mpz_class jc;
    mpz_powm(jc.get_mpz_t(), w.j.get_mpz_t(), p.c.get_mpz_t(), pk.n.get_mpz_t());
    p.z_j = j_r * jc % pk.n;
    EXPECT_FALSE(pi1_verify(ctx(), pk, w.com, bad_c0, p));
  }
  // and an honest proof does not transfer to the other ciphertext
  auto honest = pi1_prove(ctx(), pk, w.s1, w.j, w.com, w.c0, rng);
  EXPECT_FALSE(pi1_verify(ctx(), pk, w.com, bad_c0, honest));
}

TEST(Pi1, FieldMutationsRejected) {
  const auto& k = small_paillier();
  Rng rng(17);
  auto w = pi1_world(k.pk, rng);
  auto proof = pi1_prove(ctx(), k.pk, w.s1, w.j, w.com, w.c0, rng);
  auto reject = [&](PaillierPedersenProof p) { EXPECT_FALSE(pi1_verify(ctx(), k.pk, w.com, w.c0, p)); };
  auto p = proof;
  p.u1 = p.u1 * ctx().gens().g1;
  reject(p);
  p = proof;
  p.u2 = p.u2 * 2 % k.pk.n2;
  reject(p);
  p = proof;
  p.c += 1;
  reject(p);
  p = proof;
  p.z_m += 1;
  reject(p);
  p = proof;
  p.z_m += group_order();  // same residue mod p, different integer
  reject(p);
  p = proof;
  p.z_j = p.z_j * 2 % k.pk.n;
  reject(p);
  EXPECT_FALSE(pi1_verify(ctx(), k.pk, w.com * ctx().gens().g1, w.c0, proof));
}

TEST(Pi1, ResponseStaysWithinMaskBound) {
  const auto& k = small_paillier();
  Rng rng(18);
  auto w = pi1_world(k.pk, rng);
  std::size_t longest = 0;
  for (int i = 0; i < 1000; ++i) {
    auto proof = pi1_prove(ctx(), k.pk, w.s1, w.j, w.com, w.c0, rng);
    std::size_t bits = mpz_sizeinbase(proof.z_m.get_mpz_t(), 2);
    longest = std::max(longest, bits);
    // z_m is never reduced mod p
    EXPECT_GT(proof.z_m, group_order());
  }
  EXPECT_LE(longest, 256u + 2 * 128 + 1);
  EXPECT_GT(longest, 256u);
}
