#include "mtkt/sigma.hpp"

#include "mtkt/error.hpp"

namespace mtkt {

namespace {

constexpr std::uint8_t kG2Tag = 0x04;

bool same_group(const GroupElement& a, const GroupElement& b) { return a.index() == b.index(); }

// prod bases^exps where all bases share the group of `like`.
GroupElement multi_pow(const GroupElement& like, std::span<const GroupElement> bases,
                       std::span<const Scalar> exps) {
  if (std::holds_alternative<G1>(like)) {
    std::vector<G1> b;
    for (const auto& e : bases) b.push_back(std::get<G1>(e));
    return G1::multi_pow(b, exps);
  }
  std::vector<G2> b;
  for (const auto& e : bases) b.push_back(std::get<G2>(e));
  return G2::multi_pow(b, exps);
}

GroupElement identity_like(const GroupElement& like) {
  if (std::holds_alternative<G1>(like)) return G1::identity();
  return G2::identity();
}

}  // namespace

Bytes encode_element(const GroupElement& e) {
  if (const auto* p = std::get_if<G1>(&e)) {
    auto enc = p->encode();
    return Bytes(enc.begin(), enc.end());
  }
  auto enc = std::get<G2>(e).encode();
  Bytes out;
  out.reserve(enc.size() + 1);
  out.push_back(kG2Tag);
  out.insert(out.end(), enc.begin(), enc.end());
  return out;
}

GroupElement decode_element(ByteReader& r) {
  std::size_t start = r.offset();
  try {
    if (r.remaining() > 0) {
      // peek at the prefix without consuming
      ByteReader probe = r;
      if (probe.u8() == kG2Tag) {
        r.u8();
        return G2::decode(r.raw(kG2Bytes));
      }
    }
    return G1::decode(r.raw(kG1Bytes));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    throw Error(ErrorCode::kDecode, std::string(e.what()) + " (element at offset " + std::to_string(start) + ")");
  }
}

// ---------------------------------------------------------------------------

PedersenCommitment pedersen_commit(const Scalar& m, const Scalar& randomness, const G1& base1, const G1& base2) {
  if (base1.is_identity() || base2.is_identity()) {
    throw Error(ErrorCode::kInvalidArgument, "Pedersen bases must not be the identity");
  }
  const G1 bases[] = {base1, base2};
  const Scalar exps[] = {m, randomness};
  return {G1::multi_pow(bases, exps), m, randomness, base1, base2};
}

bool pedersen_open(const PedersenCommitment& c) {
  const G1 bases[] = {c.base1, c.base2};
  const Scalar exps[] = {c.message, c.randomness};
  return G1::multi_pow(bases, exps) == c.value;
}

// ---------------------------------------------------------------------------

void RepStatement::validate() const {
  if (equations.empty()) throw Error(ErrorCode::kInvalidArgument, "statement has no equations");
  std::vector<bool> used(arity, false);
  for (std::size_t i = 0; i < equations.size(); ++i) {
    const auto& eq = equations[i];
    for (const auto& term : eq.terms) {
      if (!same_group(term.base, eq.target)) {
        throw Error(ErrorCode::kInvalidArgument, "equation " + std::to_string(i) + " mixes groups");
      }
      if (const auto* idx = std::get_if<std::size_t>(&term.exponent)) {
        if (*idx >= arity) {
          throw Error(ErrorCode::kInvalidArgument, "witness index out of range in equation " + std::to_string(i));
        }
        used[*idx] = true;
      }
    }
  }
  for (std::size_t w = 0; w < arity; ++w) {
    if (!used[w]) throw Error(ErrorCode::kInvalidArgument, "witness " + std::to_string(w) + " is never used");
  }
}

Digest RepStatement::digest() const {
  ByteWriter w;
  w.str("mtkt/stmt/v1");
  w.str(domain);
  w.u32(static_cast<std::uint32_t>(arity));
  w.u32(static_cast<std::uint32_t>(equations.size()));
  for (const auto& eq : equations) {
    w.blob(encode_element(eq.target));
    w.u32(static_cast<std::uint32_t>(eq.terms.size()));
    for (const auto& term : eq.terms) {
      w.blob(encode_element(term.base));
      if (const auto* idx = std::get_if<std::size_t>(&term.exponent)) {
        w.u8(0);
        w.u32(static_cast<std::uint32_t>(*idx));
      } else {
        w.u8(1);
        w.raw(encode_scalar(std::get<Scalar>(term.exponent)));
      }
    }
  }
  return Sha256::hash(w.bytes());
}

GroupElement RepStatement::effective_target(std::size_t i) const {
  const auto& eq = equations[i];
  std::vector<GroupElement> bases{eq.target};
  std::vector<Scalar> exps{Scalar::one()};
  for (const auto& term : eq.terms) {
    if (const auto* k = std::get_if<Scalar>(&term.exponent)) {
      bases.push_back(term.base);
      exps.push_back(-*k);
    }
  }
  if (bases.size() == 1) return eq.target;
  return multi_pow(eq.target, bases, exps);
}

bool RepStatement::holds(std::span<const Scalar> witness) const {
  if (witness.size() != arity) return false;
  for (const auto& eq : equations) {
    std::vector<GroupElement> bases;
    std::vector<Scalar> exps;
    for (const auto& term : eq.terms) {
      bases.push_back(term.base);
      if (const auto* idx = std::get_if<std::size_t>(&term.exponent)) {
        exps.push_back(witness[*idx]);
      } else {
        exps.push_back(std::get<Scalar>(term.exponent));
      }
    }
    GroupElement lhs = bases.empty() ? identity_like(eq.target) : multi_pow(eq.target, bases, exps);
    if (!(lhs == eq.target)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

Bytes ProofBundle::serialize() const {
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(commitments.size()));
  for (const auto& c : commitments) w.raw(encode_element(c));
  w.raw(encode_scalar(challenge));
  w.u16(static_cast<std::uint16_t>(responses.size()));
  for (const auto& s : responses) w.raw(encode_scalar(s));
  w.raw(statement_digest);
  return std::move(w).take();
}

ProofBundle ProofBundle::deserialize(ByteView b) {
  ByteReader r(b);
  ProofBundle p;
  std::uint16_t nc = r.u16();
  for (std::uint16_t i = 0; i < nc; ++i) p.commitments.push_back(decode_element(r));
  p.challenge = decode_scalar(r.raw(kScalarBytes));
  std::uint16_t ns = r.u16();
  for (std::uint16_t i = 0; i < ns; ++i) p.responses.push_back(decode_scalar(r.raw(kScalarBytes)));
  auto d = r.raw(32);
  std::copy(d.begin(), d.end(), p.statement_digest.begin());
  r.expect_done();
  return p;
}

// ---------------------------------------------------------------------------

std::vector<GroupElement> rep_commit(const RepStatement& stmt, std::span<const Scalar> masks) {
  if (masks.size() != stmt.arity) throw Error(ErrorCode::kInvalidArgument, "mask count != arity");
  std::vector<GroupElement> out;
  out.reserve(stmt.equations.size());
  for (const auto& eq : stmt.equations) {
    std::vector<GroupElement> bases;
    std::vector<Scalar> exps;
    for (const auto& term : eq.terms) {
      if (const auto* idx = std::get_if<std::size_t>(&term.exponent)) {
        bases.push_back(term.base);
        exps.push_back(masks[*idx]);
      }
    }
    out.push_back(bases.empty() ? identity_like(eq.target) : multi_pow(eq.target, bases, exps));
  }
  return out;
}

std::vector<Scalar> rep_respond(std::span<const Scalar> masks, std::span<const Scalar> witness, const Scalar& c) {
  if (masks.size() != witness.size()) throw Error(ErrorCode::kInvalidArgument, "mask count != witness count");
  std::vector<Scalar> out(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i) out[i] = masks[i] + c * witness[i];
  return out;
}

std::vector<GroupElement> rep_recompute(const RepStatement& stmt, std::span<const Scalar> responses,
                                        const Scalar& c) {
  if (responses.size() != stmt.arity) throw Error(ErrorCode::kInvalidArgument, "response count != arity");
  std::vector<GroupElement> out;
  out.reserve(stmt.equations.size());
  for (std::size_t i = 0; i < stmt.equations.size(); ++i) {
    const auto& eq = stmt.equations[i];
    std::vector<GroupElement> bases{stmt.effective_target(i)};
    std::vector<Scalar> exps{-c};
    for (const auto& term : eq.terms) {
      if (const auto* idx = std::get_if<std::size_t>(&term.exponent)) {
        bases.push_back(term.base);
        exps.push_back(responses[*idx]);
      }
    }
    out.push_back(multi_pow(eq.target, bases, exps));
  }
  return out;
}

Scalar rep_challenge(const RepStatement& stmt, const Digest& digest, std::span<const GroupElement> commitments,
                     const ChallengeBinding& binding) {
  std::vector<Bytes> owned;
  owned.emplace_back(digest.begin(), digest.end());
  for (const auto& eq : stmt.equations) owned.push_back(encode_element(eq.target));
  for (const auto& c : commitments) owned.push_back(encode_element(c));
  owned.push_back(binding.message);
  if (binding.nonce) {
    auto n = encode_scalar(*binding.nonce);
    owned.emplace_back(n.begin(), n.end());
  }
  std::vector<ByteView> parts(owned.begin(), owned.end());
  return hash_to_scalar(stmt.domain, parts);
}

ProofBundle rep_prove(const RepStatement& stmt, std::span<const Scalar> witness, Rng& rng,
                      const ChallengeBinding& binding) {
  stmt.validate();
  if (!stmt.holds(witness)) throw Error(ErrorCode::kWitnessMismatch, "witness does not satisfy " + stmt.domain);
  std::vector<Scalar> masks(stmt.arity);
  for (auto& m : masks) m = random_nonzero_scalar(rng);
  ProofBundle p;
  p.statement_digest = stmt.digest();
  p.commitments = rep_commit(stmt, masks);
  p.challenge = rep_challenge(stmt, p.statement_digest, p.commitments, binding);
  p.responses = rep_respond(masks, witness, p.challenge);
  return p;
}

namespace {

bool commitments_match(const RepStatement& stmt, const ProofBundle& proof, const Scalar& c) {
  if (proof.statement_digest != stmt.digest()) return false;
  if (proof.responses.size() != stmt.arity || proof.commitments.size() != stmt.equations.size()) return false;
  auto recomputed = rep_recompute(stmt, proof.responses, c);
  for (std::size_t i = 0; i < recomputed.size(); ++i) {
    if (!(recomputed[i] == proof.commitments[i])) return false;
  }
  return true;
}

}  // namespace

bool rep_verify(const RepStatement& stmt, const ProofBundle& proof, const ChallengeBinding& binding) {
  try {
    stmt.validate();
  } catch (const Error&) {
    return false;
  }
  if (!commitments_match(stmt, proof, proof.challenge)) return false;
  return rep_challenge(stmt, proof.statement_digest, proof.commitments, binding) == proof.challenge;
}

RepProver::RepProver(RepStatement stmt, std::vector<Scalar> witness, Rng& rng)
    : stmt_(std::move(stmt)), witness_(std::move(witness)) {
  masks_.resize(stmt_.arity);
  for (auto& m : masks_) m = random_nonzero_scalar(rng);
  stmt_.validate();
  if (!stmt_.holds(witness_)) throw Error(ErrorCode::kWitnessMismatch, "witness does not satisfy " + stmt_.domain);
  commitments_ = rep_commit(stmt_, masks_);
}

RepProver::RepProver(RepStatement stmt, std::vector<Scalar> witness, std::vector<Scalar> masks)
    : stmt_(std::move(stmt)), witness_(std::move(witness)), masks_(std::move(masks)) {
  stmt_.validate();
  if (!stmt_.holds(witness_)) throw Error(ErrorCode::kWitnessMismatch, "witness does not satisfy " + stmt_.domain);
  commitments_ = rep_commit(stmt_, masks_);
}

ProofBundle RepProver::respond(const Scalar& c) const {
  ProofBundle p;
  p.statement_digest = stmt_.digest();
  p.commitments = commitments_;
  p.challenge = c;
  p.responses = rep_respond(masks_, witness_, c);
  return p;
}

bool rep_verify_interactive(const RepStatement& stmt, const ProofBundle& proof, const Scalar& challenge) {
  if (!(proof.challenge == challenge)) return false;
  return commitments_match(stmt, proof, challenge);
}

ProofBundle rep_simulate(const RepStatement& stmt, const Scalar& challenge, Rng& rng) {
  stmt.validate();
  ProofBundle p;
  p.statement_digest = stmt.digest();
  p.challenge = challenge;
  p.responses.resize(stmt.arity);
  for (auto& s : p.responses) s = random_nonzero_scalar(rng);
  p.commitments = rep_recompute(stmt, p.responses, challenge);
  return p;
}

std::vector<Scalar> rep_extract(const ProofBundle& a, const ProofBundle& b) {
  if (a.responses.size() != b.responses.size()) throw Error(ErrorCode::kInvalidArgument, "transcript shape mismatch");
  Scalar dc = a.challenge - b.challenge;
  if (dc.is_zero()) throw Error(ErrorCode::kInvalidArgument, "extraction needs distinct challenges");
  Scalar inv = dc.inverse();
  std::vector<Scalar> w(a.responses.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (a.responses[i] - b.responses[i]) * inv;
  return w;
}

// ---------------------------------------------------------------------------

RepStatement dleq_statement(std::string domain, const GroupElement& base_a, const GroupElement& value_a,
                            const GroupElement& base_b, const GroupElement& value_b) {
  RepStatement s;
  s.domain = std::move(domain);
  s.arity = 1;
  s.equations.push_back({value_a, {{base_a, std::size_t{0}}}});
  s.equations.push_back({value_b, {{base_b, std::size_t{0}}}});
  return s;
}

namespace {

GroupElement pow_element(const GroupElement& e, const Scalar& k) {
  if (const auto* p = std::get_if<G1>(&e)) return p->pow(k);
  return std::get<G2>(e).pow(k);
}

}  // namespace

ProofBundle dleq_sign(const Scalar& y, const GroupElement& base_a, const GroupElement& base_b, Rng& rng,
                      ByteView message) {
  auto stmt = dleq_statement("mtkt/dleq/v1", base_a, pow_element(base_a, y), base_b, pow_element(base_b, y));
  const Scalar w[] = {y};
  return rep_prove(stmt, w, rng, {Bytes(message.begin(), message.end()), std::nullopt});
}

bool dleq_verify(const GroupElement& base_a, const GroupElement& value_a, const GroupElement& base_b,
                 const GroupElement& value_b, const ProofBundle& proof, ByteView message) {
  auto stmt = dleq_statement("mtkt/dleq/v1", base_a, value_a, base_b, value_b);
  return rep_verify(stmt, proof, {Bytes(message.begin(), message.end()), std::nullopt});
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kSchnorrTag = "mtkt/schnorr/v1";

RepStatement schnorr_statement(const GroupContext& ctx, const G1& pub) {
  RepStatement s;
  s.domain = std::string(kSchnorrTag);
  s.arity = 1;
  s.equations.push_back({pub, {{ctx.gens().gU, std::size_t{0}}}});
  return s;
}

Scalar schnorr_challenge(const G1& commitment, const G1& pub, ByteView msg) {
  auto r = commitment.encode();
  auto p = pub.encode();
  return hash_to_scalar(kSchnorrTag, {ByteView(r), ByteView(p), msg});
}

}  // namespace

ProofBundle detail::schnorr_sign_with_nonce(const GroupContext& ctx, const Scalar& x, const G1& pub, ByteView msg,
                                            const Scalar& nonce) {
  auto stmt = schnorr_statement(ctx, pub);
  const Scalar w[] = {x};
  if (!stmt.holds(w)) throw Error(ErrorCode::kWitnessMismatch, "Schnorr key does not match public key");
  const Scalar masks[] = {nonce};
  ProofBundle p;
  p.statement_digest = stmt.digest();
  p.commitments = rep_commit(stmt, masks);
  p.challenge = schnorr_challenge(std::get<G1>(p.commitments[0]), pub, msg);
  p.responses = rep_respond(masks, w, p.challenge);
  return p;
}

ProofBundle schnorr_sign(const GroupContext& ctx, const Scalar& x, const G1& pub, ByteView msg, Rng& rng) {
  return detail::schnorr_sign_with_nonce(ctx, x, pub, msg, random_nonzero_scalar(rng));
}

bool schnorr_verify(const GroupContext& ctx, const G1& pub, ByteView msg, const ProofBundle& sig) {
  auto stmt = schnorr_statement(ctx, pub);
  if (!commitments_match(stmt, sig, sig.challenge)) return false;
  if (!std::holds_alternative<G1>(sig.commitments[0])) return false;
  return schnorr_challenge(std::get<G1>(sig.commitments[0]), pub, msg) == sig.challenge;
}

}  // namespace mtkt
