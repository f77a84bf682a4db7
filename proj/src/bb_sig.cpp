#include "mtkt/bb_sig.hpp"

#include "mtkt/error.hpp"

namespace mtkt {

namespace {

constexpr std::string_view kBBDleqTag = "mtkt/bb-dleq/v1";
constexpr std::string_view kIssueTag = "mtkt/token-issue/v1";

Bytes scalar_message(const Scalar& m) {
  auto b = encode_scalar(m);
  return Bytes(b.begin(), b.end());
}

RepStatement bb_dleq_statement(const GroupContext& ctx, const G2& Y, const Scalar& m, const G1& A) {
  const auto& g = ctx.gens();
  return dleq_statement(std::string(kBBDleqTag), g.g3, Y, A, g.g * A.pow(-m));
}

RepStatement issue_statement(const GroupContext& ctx, const G1& W_prime, const G1& c, const G1& A, const Scalar& r) {
  const auto& g = ctx.gens();
  const G1 bases[] = {c, g.h, A};
  const Scalar exps[] = {Scalar::one(), Scalar::one(), -r};
  return dleq_statement(std::string(kIssueTag), g.g0, W_prime, A, G1::multi_pow(bases, exps));
}

}  // namespace

BBKeyPair BBKeyPair::generate(const GroupContext& ctx, Rng& rng) { return from_secret(ctx, random_nonzero_scalar(rng)); }

BBKeyPair BBKeyPair::from_secret(const GroupContext& ctx, const Scalar& y) { return {y, ctx.gens().g3.pow(y)}; }

TokenKeyPair TokenKeyPair::generate(const GroupContext& ctx, Rng& rng) {
  return from_secret(ctx, random_nonzero_scalar(rng));
}

TokenKeyPair TokenKeyPair::from_secret(const GroupContext& ctx, const Scalar& gamma) {
  return {gamma, ctx.gens().g2.pow(gamma), ctx.gens().g0.pow(gamma)};
}

G1 bb_sign(const GroupContext& ctx, const Scalar& y, const Scalar& m) {
  Scalar e = y + m;
  if (e.is_zero()) throw Error(ErrorCode::kDegenerateExponent, "y + m = 0");
  return ctx.gens().g.pow(e.inverse());
}

bool bb_verify_pairing(const GroupContext& ctx, const G2& Y, const Scalar& m, const G1& A) {
  const auto& g = ctx.gens();
  return ctx.pair(A, Y * g.g3.pow(m)) == ctx.pair(g.g, g.g3);
}

bool bb_verify_secret(const GroupContext& ctx, const Scalar& y, const Scalar& m, const G1& A) {
  return A.pow(y + m) == ctx.gens().g;
}

SignedWithProof bb_sign_with_dleq(const GroupContext& ctx, const BBKeyPair& key, const Scalar& m, Rng& rng) {
  G1 A = bb_sign(ctx, key.y, m);
  auto stmt = bb_dleq_statement(ctx, key.Y, m, A);
  const Scalar w[] = {key.y};
  return {A, rep_prove(stmt, w, rng, {scalar_message(m), std::nullopt})};
}

bool bb_verify_dleq(const GroupContext& ctx, const G2& Y, const Scalar& m, const G1& A, const ProofBundle& proof) {
  if (A.is_identity()) return false;
  return rep_verify(bb_dleq_statement(ctx, Y, m, A), proof, {scalar_message(m), std::nullopt});
}

ExtendedIssue extended_bb_issue(const GroupContext& ctx, const TokenKeyPair& key, const G1& c, Rng& rng) {
  const auto& g = ctx.gens();
  Scalar r, e;
  do {
    r = random_nonzero_scalar(rng);
    e = key.gamma + r;
  } while (e.is_zero());
  G1 A = (c * g.h).pow(e.inverse());
  auto stmt = issue_statement(ctx, key.W_prime, c, A, r);
  const Scalar w[] = {key.gamma};
  return {A, r, rep_prove(stmt, w, rng)};
}

bool extended_bb_verify_issue(const GroupContext& ctx, const G1& W_prime, const G1& c, const ExtendedIssue& issue) {
  if (issue.A.is_identity()) return false;
  return rep_verify(issue_statement(ctx, W_prime, c, issue.A, issue.r), issue.pi2);
}

bool extended_bb_verify_secret(const GroupContext& ctx, const Scalar& gamma, const G1& c, const G1& A,
                               const Scalar& r) {
  return !A.is_identity() && A.pow(gamma + r) == c * ctx.gens().h;
}

bool extended_bb_verify_pairing(const GroupContext& ctx, const G2& W, const G1& c, const G1& A, const Scalar& r) {
  const auto& g = ctx.gens();
  return !A.is_identity() && ctx.pair(A, W * g.g2.pow(r)) == ctx.pair(c * g.h, g.g2);
}

Possession bb_possession_prove(const GroupContext& ctx, const G1& A, const Scalar& r, const Scalar& s,
                               const Scalar& alpha) {
  if (alpha.is_zero()) throw Error(ErrorCode::kInvalidArgument, "alpha must be nonzero");
  const auto& g = ctx.gens();
  Possession p;
  p.alpha = alpha;
  p.beta = alpha * s;
  p.B0 = A.pow(alpha);
  p.B_prime = p.B0.inverse();
  const G1 bases[] = {g.g1, g.h, p.B_prime};
  const Scalar exps[] = {p.beta, alpha, r};
  p.C = G1::multi_pow(bases, exps);
  return p;
}

RepStatement possession_statement(const GroupContext& ctx, const G1& B0, const G1& C) {
  const auto& g = ctx.gens();
  RepStatement s;
  s.domain = "mtkt/possession/v1";
  s.arity = 3;
  s.equations.push_back({C, {{g.g1, std::size_t{0}}, {g.h, std::size_t{1}}, {B0.inverse(), std::size_t{2}}}});
  return s;
}

bool possession_check_secret(const Scalar& gamma, const G1& B0, const G1& C) {
  return !B0.is_identity() && B0.pow(gamma) == C;
}

bool possession_check_pairing(const GroupContext& ctx, const G2& W, const G1& B0, const G1& C) {
  return !B0.is_identity() && ctx.pair(C, ctx.gens().g2) == ctx.pair(B0, W);
}

}  // namespace mtkt
