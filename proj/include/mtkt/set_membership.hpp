#pragma once

// Set-membership proof with a pairing-free prover: the issuer publishes
// A_k = g^(1/(y+k)) for every k in [1..max_ticket]; the prover shows that the
// k inside Com = g1^k hT^nu has such a signature by randomizing it
// (B = A_k^l) and proving POK(k, nu, l: Com = g1^k hT^nu, D = B^-k g^l).

#include <cstdint>
#include <variant>

#include "mtkt/group.hpp"
#include "mtkt/sigma.hpp"

namespace mtkt {

struct SignedSet {
  std::uint32_t max_ticket = 0;
  G2 Y;
  std::vector<G1> signatures;  // signatures[k - 1] = A_k

  bool contains(std::uint64_t k) const { return k >= 1 && k <= max_ticket; }
  // Throws kNoSignatureForElement outside [1..max_ticket].
  const G1& signature(std::uint64_t k) const;

  Bytes serialize() const;
  static SignedSet deserialize(ByteView b);
};

// Throws kDegenerateExponent if y + k = 0 for some k (re-key and retry).
SignedSet issue_set(const GroupContext& ctx, const Scalar& y, std::uint32_t max_ticket);

struct SmpProof {
  G1 com;
  G1 B;
  std::optional<G1> D;  // omitted when the verifier holds y
  Scalar c;
  Scalar s1, s2, s3;

  // flag byte (1 if D present) | Com | B | [D] | c | s1 | s2 | s3
  Bytes serialize() const;
  static SmpProof deserialize(ByteView b);
  friend bool operator==(const SmpProof&, const SmpProof&) = default;
};

class SmpSession;

namespace detail {
// Copies a live session so tests can answer two challenges on one set of masks.
SmpSession fork_session(const SmpSession& s);
}  // namespace detail

// Everything that does not depend on the verifier's challenge. Single use.
class SmpSession {
 public:
  static SmpSession precompute(const GroupContext& ctx, const SignedSet& set, const G1& hT, std::uint64_t k,
                               const Scalar& nu, Rng& rng);

  SmpSession(SmpSession&&) = default;
  SmpSession& operator=(SmpSession&&) = default;

  const G1& com() const { return com_; }
  const G1& B() const { return B_; }
  const G1& D() const { return D_; }
  bool consumed() const { return consumed_; }

  // Throws kSessionConsumed on a second call.
  SmpProof finalize(const Scalar& ch, bool send_D = true);

 private:
  SmpSession() = default;
  SmpSession(const SmpSession&) = default;
  friend SmpSession detail::fork_session(const SmpSession&);

  Scalar k_, nu_, l_;
  Scalar k1_, r1_, l1_;
  G1 com_, B_, D_, com1_, D1_;
  bool consumed_ = false;
};

struct SmpSecretKey {
  Scalar y;
};
struct SmpPublicKey {
  G2 Y;
};
using SmpVerifyMode = std::variant<SmpSecretKey, SmpPublicKey>;

// Secret-key mode uses no pairings (D = B^y); public mode uses exactly two
// (e(D, g3) = e(B, Y)).
bool smp_verify(const GroupContext& ctx, const G1& hT, const SmpProof& proof, const Scalar& ch,
                const SmpVerifyMode& mode);

// The proven relation for a given (Com, B, D); witnesses (k, nu, l).
RepStatement smp_statement(const GroupContext& ctx, const G1& hT, const G1& com, const G1& B, const G1& D);

// c = H("mtkt/smp/v1", Com, B, D, Com1, D1, ch)
Scalar smp_challenge(const G1& com, const G1& B, const G1& D, const G1& com1, const G1& D1, const Scalar& ch);

// Honest-verifier simulator: chooses c and s1..s3, solves for Com1 and D1.
struct SmpSimulated {
  SmpProof proof;  // c is the caller's choice, D included
  G1 com1, D1;
};
SmpSimulated smp_simulate(const GroupContext& ctx, const G1& hT, const G1& com, const G1& B, const G1& D,
                          const Scalar& c, Rng& rng);

// k, nu, l from two answers on the same commitments with different c.
std::array<Scalar, 3> smp_extract(const SmpProof& a, const SmpProof& b);

}  // namespace mtkt
