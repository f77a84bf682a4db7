#include <gtest/gtest.h>

#include <set>

#include "mtkt/error.hpp"
#include "mtkt/group.hpp"
#include "oracles/vectors.hpp"
#include "test_util.hpp"

using namespace mtkt;
using mtkt::testing::hex;
using mtkt::testing::sc;

namespace {

const GroupContext& ctx() {
  static const GroupContext c = default_context();
  return c;
}

}  // namespace

TEST(Parameters, ModuliMatchPublishedCurve) {
  EXPECT_EQ(GroupContext::field_modulus_decimal(),
            "82434016654300907520574040983783682039467282927996130024655912292889294264593");
  EXPECT_EQ(GroupContext::group_order_decimal(),
            "82434016654300907520574040983783682039180169680906587136896645255465309139857");
}

TEST(Scalars, DecimalRoundTrip) {
  Scalar k = scalar_from_decimal(vectors::kBigK);
  EXPECT_EQ(scalar_to_decimal(k), vectors::kBigK);
  EXPECT_EQ(scalar_from_decimal("0"), Scalar::zero());
  EXPECT_THROW(scalar_from_decimal(GroupContext::group_order_decimal()), Error);
  EXPECT_THROW(scalar_from_decimal("12a"), Error);
  EXPECT_THROW(scalar_from_decimal(""), Error);
  EXPECT_THROW(scalar_from_decimal("-1"), Error);
}

TEST(Scalars, EncodingIsCanonical) {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    Scalar s = random_scalar(rng);
    EXPECT_EQ(decode_scalar(encode_scalar(s)), s);
  }
  std::array<std::uint8_t, 32> all_ff{};
  all_ff.fill(0xff);
  EXPECT_THROW(decode_scalar(all_ff), Error);
  std::array<std::uint8_t, 31> short_buf{};
  EXPECT_THROW(decode_scalar(short_buf), Error);
}

TEST(HashToScalar, MatchesReference) {
  auto v = [](std::string_view s) { return ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()); };
  EXPECT_EQ(scalar_to_decimal(hash_to_scalar("mtkt/test", {v("abc"), v("de")})), vectors::kHashAbcDe);
  EXPECT_EQ(scalar_to_decimal(hash_to_scalar("mtkt/test", {v("de"), v("abc")})), vectors::kHashDeAbc);
  EXPECT_EQ(scalar_to_decimal(hash_to_scalar("mtkt/test", {v("abcd"), v("e")})), vectors::kHashAbcdE);
  EXPECT_EQ(scalar_to_decimal(hash_to_scalar("mtkt/test", {})), vectors::kHashNoParts);
  EXPECT_EQ(scalar_to_decimal(hash_to_scalar("mtkt/test", {v("")})), vectors::kHashOneEmpty);
}

TEST(HashToScalar, OrderAndBoundariesMatter) {
  EXPECT_NE(std::string(vectors::kHashAbcDe), vectors::kHashDeAbc);
  EXPECT_NE(std::string(vectors::kHashAbcDe), vectors::kHashAbcdE);
  EXPECT_NE(std::string(vectors::kHashNoParts), vectors::kHashOneEmpty);
}

TEST(Generators, MatchReferenceHashToCurve) {
  const auto& g = ctx().gens();
  const std::pair<const char*, const G1*> mine[] = {{"g", &g.g},   {"g0", &g.g0}, {"g1", &g.g1},
                                                    {"gt", &g.gt}, {"gT", &g.gT}, {"gU", &g.gU},
                                                    {"h", &g.h},   {"G", &g.G},   {"H", &g.H}};
  for (const auto& ref : vectors::kG1Generators) {
    bool found = false;
    for (auto [name, pt] : mine) {
      if (std::string(name) == ref.name) {
        EXPECT_EQ(hex(pt->encode()), ref.hex) << name;
        found = true;
      }
    }
    EXPECT_TRUE(found) << ref.name;
  }
  for (const auto& ref : vectors::kG2Generators) {
    const G2& pt = std::string(ref.name) == "g2" ? g.g2 : g.g3;
    std::string enc = hex(pt.encode());
    EXPECT_TRUE(enc == ref.hex_a || enc == ref.hex_b) << ref.name;
  }
}

TEST(Generators, PairwiseDistinctAndNonTrivial) {
  const auto& g = ctx().gens();
  std::set<std::string> seen;
  for (const G1* p : {&g.g, &g.g0, &g.g1, &g.gt, &g.gT, &g.gU, &g.h, &g.G, &g.H}) {
    EXPECT_FALSE(p->is_identity());
    EXPECT_TRUE(seen.insert(hex(p->encode())).second);
  }
  EXPECT_FALSE(g.g2 == g.g3);
  EXPECT_FALSE(g.g2.is_identity());
}

TEST(G1Arith, ScalarMultiplicationMatchesReference) {
  const G1& g = ctx().gens().g;
  EXPECT_EQ(hex(g.pow(sc(2)).encode()), vectors::kGPow2);
  EXPECT_EQ(hex((g * g).encode()), vectors::kGPow2);
  EXPECT_EQ(hex(g.pow(-Scalar::one()).encode()), vectors::kGPowPMinus1);
  EXPECT_EQ(g.pow(-Scalar::one()), g.inverse());
  EXPECT_EQ(hex(g.pow(scalar_from_decimal(vectors::kBigK)).encode()), vectors::kGPowBigK);
  EXPECT_TRUE(g.pow(Scalar::zero()).is_identity());
  EXPECT_TRUE((g / g).is_identity());
}

TEST(G1Arith, MultiPowAgreesWithNaive) {
  const auto& gens = ctx().gens();
  Rng rng(11);
  const G1 bases[] = {gens.g, gens.h, gens.G, gens.H, gens.g1};
  for (int trial = 0; trial < 20; ++trial) {
    Scalar e[5];
    G1 naive;
    for (int i = 0; i < 5; ++i) {
      e[i] = random_scalar(rng);
      naive *= bases[i].pow(e[i]);
    }
    EXPECT_EQ(G1::multi_pow(bases, e), naive);
  }
  const Scalar pe[] = {sc(12345), sc(67890)};
  const G1 pb[] = {gens.gT, gens.h};
  EXPECT_EQ(hex(G1::multi_pow(pb, pe).encode()), vectors::kPedersenGTh);
}

TEST(G1Encoding, RoundTripAndRejections) {
  Rng rng(3);
  const G1& g = ctx().gens().g;
  for (int i = 0; i < 30; ++i) {
    G1 p = g.pow(random_scalar(rng));
    EXPECT_EQ(G1::decode(p.encode()), p);
  }
  EXPECT_TRUE(G1::decode(G1::identity().encode()).is_identity());

  auto enc = g.encode();
  auto bad_prefix = enc;
  bad_prefix[0] = 0x05;
  EXPECT_THROW(G1::decode(bad_prefix), Error);
  auto non_canonical = enc;
  std::fill(non_canonical.begin() + 1, non_canonical.end(), 0xff);
  EXPECT_THROW(G1::decode(non_canonical), Error);
  EXPECT_THROW(G1::decode(ByteView(enc).first(32)), Error);
  auto bad_identity = G1::identity().encode();
  bad_identity[5] = 1;
  EXPECT_THROW(G1::decode(bad_identity), Error);

  // about half of all x-coordinates are off the curve
  int off_curve = 0;
  for (std::uint8_t x = 1; x < 40; ++x) {
    auto b = enc;
    std::fill(b.begin() + 1, b.end(), 0);
    b[32] = x;
    try {
      G1::decode(b);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDecode);
      ++off_curve;
    }
  }
  EXPECT_GT(off_curve, 5);
}

TEST(G2Encoding, RoundTripAndRejections) {
  Rng rng(4);
  const G2& g2 = ctx().gens().g2;
  for (int i = 0; i < 5; ++i) {
    G2 p = g2.pow(random_scalar(rng));
    EXPECT_EQ(G2::decode(p.encode()), p);
  }
  EXPECT_TRUE(G2::decode(G2::identity().encode()).is_identity());
  auto enc = g2.encode();
  enc[127] ^= 1;
  EXPECT_THROW(G2::decode(enc), Error);
}

TEST(Pairing, BilinearNonDegenerate) {
  const auto& g = ctx().gens();
  GT base = ctx().pair(g.g, g.g2);
  EXPECT_FALSE(base.is_one());
  EXPECT_TRUE(ctx().pair(G1::identity(), g.g2).is_one());
  EXPECT_TRUE(ctx().pair(g.g, G2::identity()).is_one());
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    Scalar a = random_scalar(rng), b = random_scalar(rng);
    ASSERT_EQ(ctx().pair(g.g.pow(a), g.g2.pow(b)), base.pow(a * b)) << "trial " << i;
  }
}

TEST(Pairing, TargetGroupHasOrderP) {
  const auto& g = ctx().gens();
  GT e = ctx().pair(g.h, g.g3);
  EXPECT_TRUE(GT(e.value().pow(bn::FrTag::kModulus)).is_one());
}

TEST(Pairing, FastFinalExponentiationMatchesNaive) {
  Rng rng(6);
  for (int i = 0; i < 3; ++i) {
    bn::Fq12 f = bn::Fq12::one();
    auto fq = [&] { return bn::Fq::from_bytes_reduce(rng.bytes(32)); };
    f.c0.c1 = {fq(), fq()};
    f.c1.c0 = {fq(), fq()};
    f.c1.c2 = {fq(), fq()};
    EXPECT_EQ(bn::final_exponentiation(f), bn::final_exponentiation_naive(f));
  }
}

TEST(Counters, PairingsArePerContext) {
  GroupContext a = ctx().fork();
  GroupContext b = ctx().fork();
  const auto& g = a.gens();
  a.pair(g.g, g.g2);
  a.pair(g.g, g.g3);
  b.pair(g.h, g.g2);
  EXPECT_EQ(a.pairing_count(), 2u);
  EXPECT_EQ(b.pairing_count(), 1u);
  a.reset_pairing_count();
  EXPECT_EQ(a.pairing_count(), 0u);
  EXPECT_TRUE(&a.gens() == &b.gens());
}

TEST(Counters, GroupOpsCountEachOperation) {
  const auto& g = ctx().gens();
  auto before = group_op_count();
  G1 x = g.g.pow(sc(3));
  x = x * g.h;
  x = x.inverse();
  EXPECT_EQ(group_op_count() - before, 3u);
  before = group_op_count();
  const G1 bases[] = {g.g, g.h, g.G};
  const Scalar exps[] = {sc(1), sc(2), sc(3)};
  G1::multi_pow(bases, exps);
  EXPECT_EQ(group_op_count() - before, 3u);
  before = group_op_count();
  (void)(x == g.g);
  (void)x.encode();
  (void)hash_to_scalar("t", {});
  EXPECT_EQ(group_op_count(), before);
}
