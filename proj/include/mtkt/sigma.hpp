#pragma once

// Generic sigma-protocol machinery: Pedersen commitments, proofs of
// representation over a wiring table, DLEQ and Schnorr signatures of
// knowledge. Every zero-knowledge proof in the library is an instance of
// RepStatement; protocol modules pick their own transcript layout on top of
// rep_commit / rep_respond / rep_recompute.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mtkt/group.hpp"
#include "mtkt/sha256.hpp"

namespace mtkt {

using GroupElement = std::variant<G1, G2>;

// G1 elements use their 33-byte encoding; G2 elements are 0x04 followed by
// the 128-byte encoding (0x04 never starts a G1 encoding).
Bytes encode_element(const GroupElement& e);
GroupElement decode_element(ByteReader& r);

struct PedersenCommitment {
  G1 value;
  Scalar message;
  Scalar randomness;
  G1 base1, base2;
};

// value = base1^m * base2^randomness. Identity bases are rejected.
PedersenCommitment pedersen_commit(const Scalar& m, const Scalar& randomness, const G1& base1, const G1& base2);
bool pedersen_open(const PedersenCommitment& c);

struct RepTerm {
  GroupElement base;
  // witness index, or a public constant exponent
  std::variant<std::size_t, Scalar> exponent;
};

// target = prod base^exponent, all in the same group as target.
struct RepEquation {
  GroupElement target;
  std::vector<RepTerm> terms;
};

struct RepStatement {
  std::string domain;
  std::size_t arity = 0;
  std::vector<RepEquation> equations;

  // Throws kInvalidArgument for group mismatches, out-of-range indices or
  // unused witnesses.
  void validate() const;
  Digest digest() const;
  // target with the constant terms divided out
  GroupElement effective_target(std::size_t equation) const;
  bool holds(std::span<const Scalar> witness) const;
};

struct ProofBundle {
  std::vector<GroupElement> commitments;
  Scalar challenge;
  std::vector<Scalar> responses;
  Digest statement_digest{};

  Bytes serialize() const;
  static ProofBundle deserialize(ByteView b);
  friend bool operator==(const ProofBundle&, const ProofBundle&) = default;
};

// What the Fiat-Shamir challenge is bound to beyond the statement and the
// commitments: an optional message (signatures of knowledge) and an optional
// verifier nonce ch.
struct ChallengeBinding {
  Bytes message;
  std::optional<Scalar> nonce;
};

// Per-equation commitments prod base^mask[index].
std::vector<GroupElement> rep_commit(const RepStatement& stmt, std::span<const Scalar> masks);
// response_i = mask_i + c * witness_i
std::vector<Scalar> rep_respond(std::span<const Scalar> masks, std::span<const Scalar> witness, const Scalar& c);
// prod base^response * target^-c for each equation
std::vector<GroupElement> rep_recompute(const RepStatement& stmt, std::span<const Scalar> responses, const Scalar& c);

Scalar rep_challenge(const RepStatement& stmt, const Digest& digest, std::span<const GroupElement> commitments,
                     const ChallengeBinding& binding);

ProofBundle rep_prove(const RepStatement& stmt, std::span<const Scalar> witness, Rng& rng,
                      const ChallengeBinding& binding = {});
bool rep_verify(const RepStatement& stmt, const ProofBundle& proof, const ChallengeBinding& binding = {});

// Interactive form: the prover commits, the verifier answers with c.
class RepProver {
 public:
  RepProver(RepStatement stmt, std::vector<Scalar> witness, Rng& rng);
  // Test hook: fixed masks instead of random ones.
  RepProver(RepStatement stmt, std::vector<Scalar> witness, std::vector<Scalar> masks);

  const std::vector<GroupElement>& commitments() const { return commitments_; }
  // May be called repeatedly; only tests do so (two answers on the same
  // masks reveal the witness).
  ProofBundle respond(const Scalar& c) const;

 private:
  RepStatement stmt_;
  std::vector<Scalar> witness_;
  std::vector<Scalar> masks_;
  std::vector<GroupElement> commitments_;
};

bool rep_verify_interactive(const RepStatement& stmt, const ProofBundle& proof, const Scalar& challenge);

// Honest-verifier simulator: picks c and the responses first, then solves for
// the commitments. Output passes rep_verify_interactive.
ProofBundle rep_simulate(const RepStatement& stmt, const Scalar& challenge, Rng& rng);

// Two accepting transcripts on the same commitments with distinct challenges
// yield the witness: w_i = (s_i - s'_i) / (c - c').
std::vector<Scalar> rep_extract(const ProofBundle& a, const ProofBundle& b);

// DLEQ: value_a = base_a^y and value_b = base_b^y. Bases may be in different
// groups (G2 public key, G1 signature).
RepStatement dleq_statement(std::string domain, const GroupElement& base_a, const GroupElement& value_a,
                            const GroupElement& base_b, const GroupElement& value_b);
ProofBundle dleq_sign(const Scalar& y, const GroupElement& base_a, const GroupElement& base_b, Rng& rng,
                      ByteView message = {});
bool dleq_verify(const GroupElement& base_a, const GroupElement& value_a, const GroupElement& base_b,
                 const GroupElement& value_b, const ProofBundle& proof, ByteView message = {});

// Schnorr signature under pub = gU^x with c = H("mtkt/schnorr/v1", [R, pub, msg]).
ProofBundle schnorr_sign(const GroupContext& ctx, const Scalar& x, const G1& pub, ByteView msg, Rng& rng);
bool schnorr_verify(const GroupContext& ctx, const G1& pub, ByteView msg, const ProofBundle& sig);

namespace detail {
ProofBundle schnorr_sign_with_nonce(const GroupContext& ctx, const Scalar& x, const G1& pub, ByteView msg,
                                    const Scalar& nonce);
}

}  // namespace mtkt
