#include "mtkt/set_membership.hpp"

#include "mtkt/bb_sig.hpp"
#include "mtkt/error.hpp"

namespace mtkt {

namespace {

constexpr std::string_view kSmpTag = "mtkt/smp/v1";

G1 read_g1(ByteReader& r) { return G1::decode(r.raw(kG1Bytes)); }
Scalar read_scalar(ByteReader& r) { return decode_scalar(r.raw(kScalarBytes)); }

}  // namespace

const G1& SignedSet::signature(std::uint64_t k) const {
  if (!contains(k)) {
    throw Error(ErrorCode::kNoSignatureForElement,
                std::to_string(k) + " is not in [1.." + std::to_string(max_ticket) + "]");
  }
  return signatures[k - 1];
}

Bytes SignedSet::serialize() const {
  ByteWriter w;
  w.u32(max_ticket);
  w.raw(Y.encode());
  for (const auto& a : signatures) w.raw(a.encode());
  return std::move(w).take();
}

SignedSet SignedSet::deserialize(ByteView b) {
  ByteReader r(b);
  SignedSet s;
  s.max_ticket = r.u32();
  if (s.max_ticket == 0) throw Error(ErrorCode::kParse, "empty signed set");
  s.Y = G2::decode(r.raw(kG2Bytes));
  if (r.remaining() != std::size_t{s.max_ticket} * kG1Bytes) throw Error(ErrorCode::kParse, "signed set length");
  for (std::uint32_t i = 0; i < s.max_ticket; ++i) s.signatures.push_back(read_g1(r));
  return s;
}

SignedSet issue_set(const GroupContext& ctx, const Scalar& y, std::uint32_t max_ticket) {
  if (max_ticket == 0) throw Error(ErrorCode::kInvalidArgument, "max_ticket must be at least 1");
  SignedSet s;
  s.max_ticket = max_ticket;
  s.Y = ctx.gens().g3.pow(y);
  s.signatures.reserve(max_ticket);
  for (std::uint32_t k = 1; k <= max_ticket; ++k) s.signatures.push_back(bb_sign(ctx, y, Scalar::from_u64(k)));
  return s;
}

Bytes SmpProof::serialize() const {
  ByteWriter w;
  w.u8(D ? 1 : 0);
  w.raw(com.encode());
  w.raw(B.encode());
  if (D) w.raw(D->encode());
  for (const Scalar* s : {&c, &s1, &s2, &s3}) w.raw(encode_scalar(*s));
  return std::move(w).take();
}

SmpProof SmpProof::deserialize(ByteView b) {
  ByteReader r(b);
  SmpProof p;
  std::uint8_t flag = r.u8();
  if (flag > 1) throw Error(ErrorCode::kParse, "bad D flag");
  p.com = read_g1(r);
  p.B = read_g1(r);
  if (flag) p.D = read_g1(r);
  p.c = read_scalar(r);
  p.s1 = read_scalar(r);
  p.s2 = read_scalar(r);
  p.s3 = read_scalar(r);
  r.expect_done();
  return p;
}

RepStatement smp_statement(const GroupContext& ctx, const G1& hT, const G1& com, const G1& B, const G1& D) {
  const auto& g = ctx.gens();
  RepStatement s;
  s.domain = std::string(kSmpTag);
  s.arity = 3;
  s.equations.push_back({com, {{g.g1, std::size_t{0}}, {hT, std::size_t{1}}}});
  s.equations.push_back({D, {{B.inverse(), std::size_t{0}}, {g.g, std::size_t{2}}}});
  return s;
}

Scalar smp_challenge(const G1& com, const G1& B, const G1& D, const G1& com1, const G1& D1, const Scalar& ch) {
  auto e0 = com.encode();
  auto e1 = B.encode();
  auto e2 = D.encode();
  auto e3 = com1.encode();
  auto e4 = D1.encode();
  auto e5 = encode_scalar(ch);
  return hash_to_scalar(kSmpTag, {ByteView(e0), ByteView(e1), ByteView(e2), ByteView(e3), ByteView(e4), ByteView(e5)});
}

SmpSession SmpSession::precompute(const GroupContext& ctx, const SignedSet& set, const G1& hT, std::uint64_t k,
                                  const Scalar& nu, Rng& rng) {
  const G1& A_k = set.signature(k);
  const auto& g = ctx.gens();
  SmpSession s;
  s.k_ = Scalar::from_u64(k);
  s.nu_ = nu;
  s.l_ = random_nonzero_scalar(rng);
  s.k1_ = random_nonzero_scalar(rng);
  s.r1_ = random_nonzero_scalar(rng);
  s.l1_ = random_nonzero_scalar(rng);

  const G1 cb[] = {g.g1, hT};
  const Scalar ce[] = {s.k_, nu};
  s.com_ = G1::multi_pow(cb, ce);
  s.B_ = A_k.pow(s.l_);
  G1 B1 = s.B_.inverse();
  const G1 db[] = {B1, g.g};
  const Scalar de[] = {s.k_, s.l_};
  s.D_ = G1::multi_pow(db, de);
  const Scalar c1e[] = {s.k1_, s.r1_};
  s.com1_ = G1::multi_pow(cb, c1e);
  const Scalar d1e[] = {s.k1_, s.l1_};
  s.D1_ = G1::multi_pow(db, d1e);
  return s;
}

SmpProof SmpSession::finalize(const Scalar& ch, bool send_D) {
  if (consumed_) throw Error(ErrorCode::kSessionConsumed, "set-membership session already answered");
  consumed_ = true;
  SmpProof p;
  p.com = com_;
  p.B = B_;
  if (send_D) p.D = D_;
  p.c = smp_challenge(com_, B_, D_, com1_, D1_, ch);
  p.s1 = k1_ + p.c * k_;
  p.s2 = r1_ + p.c * nu_;
  p.s3 = l1_ + p.c * l_;
  return p;
}

SmpSession detail::fork_session(const SmpSession& s) { return SmpSession(s); }

bool smp_verify(const GroupContext& ctx, const G1& hT, const SmpProof& proof, const Scalar& ch,
                const SmpVerifyMode& mode) {
  if (proof.B.is_identity()) return false;
  G1 D;
  if (const auto* sk = std::get_if<SmpSecretKey>(&mode)) {
    D = proof.B.pow(sk->y);
    if (proof.D && !(*proof.D == D)) return false;
  } else {
    if (!proof.D) return false;
    D = *proof.D;
    const auto& g = ctx.gens();
    if (!(ctx.pair(D, g.g3) == ctx.pair(proof.B, std::get<SmpPublicKey>(mode).Y))) return false;
  }
  auto stmt = smp_statement(ctx, hT, proof.com, proof.B, D);
  const Scalar resp[] = {proof.s1, proof.s2, proof.s3};
  auto tilde = rep_recompute(stmt, resp, proof.c);
  return smp_challenge(proof.com, proof.B, D, std::get<G1>(tilde[0]), std::get<G1>(tilde[1]), ch) == proof.c;
}

SmpSimulated smp_simulate(const GroupContext& ctx, const G1& hT, const G1& com, const G1& B, const G1& D,
                          const Scalar& c, Rng& rng) {
  auto stmt = smp_statement(ctx, hT, com, B, D);
  auto bundle = rep_simulate(stmt, c, rng);
  SmpSimulated out;
  out.proof = {com, B, D, c, bundle.responses[0], bundle.responses[1], bundle.responses[2]};
  out.com1 = std::get<G1>(bundle.commitments[0]);
  out.D1 = std::get<G1>(bundle.commitments[1]);
  return out;
}

std::array<Scalar, 3> smp_extract(const SmpProof& a, const SmpProof& b) {
  Scalar dc = a.c - b.c;
  if (dc.is_zero()) throw Error(ErrorCode::kInvalidArgument, "extraction needs distinct challenges");
  Scalar inv = dc.inverse();
  return {(a.s1 - b.s1) * inv, (a.s2 - b.s2) * inv, (a.s3 - b.s3) * inv};
}

}  // namespace mtkt
