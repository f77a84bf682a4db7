#pragma once

// Boneh-Boyen signatures. The plain form A = g^(1/(y+m)) signs set elements;
// the extended form A = (c*h)^(1/(gamma+r)) with c = g1^s is the permission
// token. Both can be checked with pairings or, by the key holder, with one
// exponentiation.

#include "mtkt/group.hpp"
#include "mtkt/sigma.hpp"

namespace mtkt {

// Set-membership signing key: Y = g3^y.
struct BBKeyPair {
  Scalar y;
  G2 Y;

  static BBKeyPair generate(const GroupContext& ctx, Rng& rng);
  static BBKeyPair from_secret(const GroupContext& ctx, const Scalar& y);
};

// Token issuing key: W = g2^gamma, W' = g0^gamma.
struct TokenKeyPair {
  Scalar gamma;
  G2 W;
  G1 W_prime;

  static TokenKeyPair generate(const GroupContext& ctx, Rng& rng);
  static TokenKeyPair from_secret(const GroupContext& ctx, const Scalar& gamma);
};

// Throws kDegenerateExponent when y + m = 0.
G1 bb_sign(const GroupContext& ctx, const Scalar& y, const Scalar& m);
// e(A, Y * g3^m) == e(g, g3); two pairings.
bool bb_verify_pairing(const GroupContext& ctx, const G2& Y, const Scalar& m, const G1& A);
// A^(y+m) == g; no pairings.
bool bb_verify_secret(const GroupContext& ctx, const Scalar& y, const Scalar& m, const G1& A);

struct SignedWithProof {
  G1 A;
  ProofBundle proof;  // DLEQ(y: Y = g3^y, A^y = g * A^-m)
};

SignedWithProof bb_sign_with_dleq(const GroupContext& ctx, const BBKeyPair& key, const Scalar& m, Rng& rng);
bool bb_verify_dleq(const GroupContext& ctx, const G2& Y, const Scalar& m, const G1& A, const ProofBundle& proof);

struct ExtendedIssue {
  G1 A;
  Scalar r;
  ProofBundle pi2;  // DLEQ(gamma: W' = g0^gamma, A^gamma = c * h * A^-r)
};

// Issues A = (c*h)^(1/(gamma+r)) for a fresh r; a degenerate r is resampled.
ExtendedIssue extended_bb_issue(const GroupContext& ctx, const TokenKeyPair& key, const G1& c, Rng& rng);
// Pairing-free check of pi2 against the issuer's W'.
bool extended_bb_verify_issue(const GroupContext& ctx, const G1& W_prime, const G1& c, const ExtendedIssue& issue);
bool extended_bb_verify_secret(const GroupContext& ctx, const Scalar& gamma, const G1& c, const G1& A,
                               const Scalar& r);
// e(A, W * g2^r) == e(c*h, g2)
bool extended_bb_verify_pairing(const GroupContext& ctx, const G2& W, const G1& c, const G1& A, const Scalar& r);

// Randomized token for a pairing-free possession proof:
// B0 = A^alpha, B' = B0^-1, C = g1^(alpha s) h^alpha B'^r = B0^gamma.
struct Possession {
  G1 B0;
  G1 B_prime;
  G1 C;
  Scalar alpha;
  Scalar beta;  // alpha * s
};

Possession bb_possession_prove(const GroupContext& ctx, const G1& A, const Scalar& r, const Scalar& s,
                               const Scalar& alpha);

// POK(beta, alpha, r: C = g1^beta h^alpha B'^r), witnesses in that order.
RepStatement possession_statement(const GroupContext& ctx, const G1& B0, const G1& C);

// Verifier side of the possession proof: B0 != 1 and C = B0^gamma.
bool possession_check_secret(const Scalar& gamma, const G1& B0, const G1& C);
// B0 != 1 and e(C, g2) = e(B0, W); two pairings.
bool possession_check_pairing(const GroupContext& ctx, const G2& W, const G1& B0, const G1& C);

}  // namespace mtkt
