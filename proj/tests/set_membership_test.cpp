#include <gtest/gtest.h>

#include "mtkt/bb_sig.hpp"
#include "mtkt/error.hpp"
#include "mtkt/set_membership.hpp"
#include "test_util.hpp"

using namespace mtkt;
using mtkt::testing::sc;

namespace {

const GroupContext& ctx() {
  static const GroupContext c = default_context();
  return c;
}

struct World {
  Scalar y;
  SignedSet set;
  G1 hT;
};

World make_world(Rng& rng, std::uint32_t max_ticket) {
  Scalar y = random_nonzero_scalar(rng);
  return {y, issue_set(ctx(), y, max_ticket), ctx().gens().gT.pow(random_nonzero_scalar(rng))};
}

}  // namespace

TEST(SignedSet, IssueAndVerify) {
  Rng rng(1);
  auto w = make_world(rng, 10);
  ASSERT_EQ(w.set.signatures.size(), 10u);
  for (std::uint32_t k = 1; k <= 10; ++k) {
    EXPECT_EQ(w.set.signature(k).pow(w.y + sc(k)), ctx().gens().g);
    EXPECT_TRUE(bb_verify_pairing(ctx(), w.set.Y, sc(k), w.set.signature(k)));
  }
  auto one = issue_set(ctx(), w.y, 1);
  EXPECT_EQ(one.signatures.size(), 1u);
  EXPECT_EQ(one.signature(1), ctx().gens().g.pow((w.y + Scalar::one()).inverse()));
  EXPECT_THROW(one.signature(2), Error);
  EXPECT_THROW(one.signature(0), Error);
  EXPECT_EQ(SignedSet::deserialize(w.set.serialize()).signatures, w.set.signatures);
  EXPECT_THROW(issue_set(ctx(), w.y, 0), Error);
  EXPECT_THROW(issue_set(ctx(), -sc(3), 5), Error);
}

TEST(Smp, PrecomputeIsPairingFreeAndConsistent) {
  Rng rng(2);
  auto w = make_world(rng, 10);
  auto fork = ctx().fork();
  auto s = SmpSession::precompute(fork, w.set, w.hT, 3, random_scalar(rng), rng);
  EXPECT_EQ(fork.pairing_count(), 0u);
  EXPECT_EQ(s.D(), s.B().pow(w.y));
  try {
    SmpSession::precompute(fork, w.set, w.hT, 11, random_scalar(rng), rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoSignatureForElement);
  }
}

TEST(Smp, CompletenessBothModes) {
  Rng rng(3);
  for (std::uint32_t max_ticket : {1u, 5u, 10u}) {
    auto w = make_world(rng, max_ticket);
    for (std::uint32_t k = 1; k <= max_ticket; ++k) {
      Scalar ch = random_nonzero_scalar(rng);
      auto s = SmpSession::precompute(ctx(), w.set, w.hT, k, random_scalar(rng), rng);
      auto proof = s.finalize(ch);
      auto secret_ctx = ctx().fork();
      auto public_ctx = ctx().fork();
      EXPECT_TRUE(smp_verify(secret_ctx, w.hT, proof, ch, SmpSecretKey{w.y}));
      EXPECT_TRUE(smp_verify(public_ctx, w.hT, proof, ch, SmpPublicKey{w.set.Y}));
      EXPECT_EQ(secret_ctx.pairing_count(), 0u);
      EXPECT_EQ(public_ctx.pairing_count(), 2u);
    }
  }
}

TEST(Smp, OmittedDOnlyForSecretMode) {
  Rng rng(4);
  auto w = make_world(rng, 5);
  Scalar ch = sc(42);
  auto s = SmpSession::precompute(ctx(), w.set, w.hT, 2, random_scalar(rng), rng);
  auto proof = s.finalize(ch, false);
  EXPECT_FALSE(proof.D.has_value());
  EXPECT_EQ(proof.serialize().size(), 1 + 2 * 33 + 4 * 32u);
  EXPECT_TRUE(smp_verify(ctx(), w.hT, proof, ch, SmpSecretKey{w.y}));
  EXPECT_FALSE(smp_verify(ctx(), w.hT, proof, ch, SmpPublicKey{w.set.Y}));
  EXPECT_EQ(SmpProof::deserialize(proof.serialize()), proof);
}

TEST(Smp, SessionIsSingleUse) {
  Rng rng(5);
  auto w = make_world(rng, 5);
  auto s = SmpSession::precompute(ctx(), w.set, w.hT, 2, random_scalar(rng), rng);
  s.finalize(sc(1));
  EXPECT_TRUE(s.consumed());
  try {
    s.finalize(sc(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSessionConsumed);
  }
}

TEST(Smp, IdentityBRejectedFirst) {
  Rng rng(6);
  auto w = make_world(rng, 5);
  auto s = SmpSession::precompute(ctx(), w.set, w.hT, 2, random_scalar(rng), rng);
  auto proof = s.finalize(sc(7));
  proof.B = G1::identity();
  proof.D = G1::identity();
  auto fork = ctx().fork();
  EXPECT_FALSE(smp_verify(fork, w.hT, proof, sc(7), SmpPublicKey{w.set.Y}));
  EXPECT_EQ(fork.pairing_count(), 0u);
  EXPECT_FALSE(smp_verify(fork, w.hT, proof, sc(7), SmpSecretKey{w.y}));
}

TEST(Smp, ForgedDRejectedByBothModes) {
  Rng rng(7);
  auto w = make_world(rng, 5);
  const auto& g = ctx().gens();
  // A prover without A_k: pick B at random and D honestly as B^-k g^l, which
  // is not B^y. The sigma part is then valid, only the D check can catch it.
  Scalar k = sc(7), nu = random_scalar(rng), l = random_nonzero_scalar(rng);
  G1 B = g.g.pow(random_nonzero_scalar(rng));
  G1 com = g.g1.pow(k) * w.hT.pow(nu);
  G1 D = B.inverse().pow(k) * g.g.pow(l);
  ASSERT_FALSE(D == B.pow(w.y));
  auto stmt = smp_statement(ctx(), w.hT, com, B, D);
  std::vector<Scalar> masks = {random_scalar(rng), random_scalar(rng), random_scalar(rng)};
  auto commits = rep_commit(stmt, masks);
  Scalar ch = sc(3);
  SmpProof p{com, B, D, Scalar::zero(), {}, {}, {}};
  p.c = smp_challenge(com, B, D, std::get<G1>(commits[0]), std::get<G1>(commits[1]), ch);
  const Scalar wit[] = {k, nu, l};
  auto resp = rep_respond(masks, wit, p.c);
  p.s1 = resp[0];
  p.s2 = resp[1];
  p.s3 = resp[2];
  EXPECT_FALSE(smp_verify(ctx(), w.hT, p, ch, SmpSecretKey{w.y}));
  EXPECT_FALSE(smp_verify(ctx(), w.hT, p, ch, SmpPublicKey{w.set.Y}));
  p.D.reset();
  EXPECT_FALSE(smp_verify(ctx(), w.hT, p, ch, SmpSecretKey{w.y}));
}

TEST(Smp, MutationsRejectedAndModesAgree) {
  Rng rng(8);
  auto w = make_world(rng, 10);
  const auto& g = ctx().gens();
  Scalar ch = random_nonzero_scalar(rng);
  auto s = SmpSession::precompute(ctx(), w.set, w.hT, 4, random_scalar(rng), rng);
  auto proof = s.finalize(ch);
  Bytes wire = proof.serialize();
  int rejected = 0;
  for (int i = 0; i < 60; ++i) {
    Bytes b = wire;
    std::size_t pos = 1 + (i * 37) % (wire.size() - 1);
    b[pos] ^= static_cast<std::uint8_t>(1u << (i % 8));
    bool sk_ok = false, pk_ok = false;
    try {
      auto p = SmpProof::deserialize(b);
      sk_ok = smp_verify(ctx(), w.hT, p, ch, SmpSecretKey{w.y});
      pk_ok = smp_verify(ctx(), w.hT, p, ch, SmpPublicKey{w.set.Y});
    } catch (const Error&) {
    }
    EXPECT_EQ(sk_ok, pk_ok);
    rejected += !sk_ok && !pk_ok;
  }
  EXPECT_EQ(rejected, 60);
  auto p = proof;
  p.com = p.com * g.g1;
  EXPECT_FALSE(smp_verify(ctx(), w.hT, p, ch, SmpSecretKey{w.y}));
  EXPECT_FALSE(smp_verify(ctx(), w.hT, proof, ch + Scalar::one(), SmpSecretKey{w.y}));
}

TEST(Smp, ExtractorRecoversK) {
  Rng rng(9);
  auto w = make_world(rng, 10);
  for (std::uint64_t k : {1u, 6u, 10u}) {
    Scalar nu = random_scalar(rng);
    auto s = SmpSession::precompute(ctx(), w.set, w.hT, k, nu, rng);
    auto copy = detail::fork_session(s);
    auto a = s.finalize(sc(100));
    auto b = copy.finalize(sc(200));
    ASSERT_NE(a.c, b.c);
    ASSERT_TRUE(smp_verify(ctx(), w.hT, a, sc(100), SmpSecretKey{w.y}));
    ASSERT_TRUE(smp_verify(ctx(), w.hT, b, sc(200), SmpSecretKey{w.y}));
    auto x = smp_extract(a, b);
    EXPECT_EQ(x[0], sc(k));
    EXPECT_EQ(x[1], nu);
    // D = B^-k g^l  => l from the extracted witness reproduces D
    EXPECT_EQ(a.B.inverse().pow(x[0]) * ctx().gens().g.pow(x[2]), *a.D);
  }
}

TEST(Smp, SimulatedTranscriptsVerify) {
  Rng rng(10);
  auto w = make_world(rng, 5);
  auto s = SmpSession::precompute(ctx(), w.set, w.hT, 1, random_scalar(rng), rng);
  for (int i = 0; i < 10; ++i) {
    Scalar c = random_scalar(rng);
    auto sim = smp_simulate(ctx(), w.hT, s.com(), s.B(), s.D(), c, rng);
    auto stmt = smp_statement(ctx(), w.hT, s.com(), s.B(), s.D());
    const Scalar resp[] = {sim.proof.s1, sim.proof.s2, sim.proof.s3};
    auto tilde = rep_recompute(stmt, resp, c);
    EXPECT_EQ(std::get<G1>(tilde[0]), sim.com1);
    EXPECT_EQ(std::get<G1>(tilde[1]), sim.D1);
    EXPECT_EQ(*sim.proof.D, sim.proof.B.pow(w.y));
  }
}
