#pragma once

// The m-ticketing protocol: setup, registration, permission-token request,
// ticket precomputation / real-time issue / verification, validator
// authentication, revocation, duplicate detection and reporting of unused
// tickets.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mtkt/bb_sig.hpp"
#include "mtkt/encryption.hpp"
#include "mtkt/rsa.hpp"
#include "mtkt/set_membership.hpp"
#include "mtkt/sigma.hpp"

namespace mtkt {

inline constexpr std::size_t kTicketWitnesses = 13;
inline constexpr std::size_t kTicketEquations = 10;
inline constexpr std::size_t kSessionBytes = 24 * kScalarBytes + 10 * kG1Bytes + 32;      // 1130
inline constexpr std::size_t kTicketBytes = 10 * kG1Bytes + 14 * kScalarBytes;            // 778
inline constexpr std::size_t kCompactTicketBytes = 8 * kG1Bytes + 14 * kScalarBytes;      // 712
inline constexpr std::uint64_t kSecondsPerDay = 86400;
// Reports are accepted up to this long after the token deadline.
inline constexpr std::uint64_t kReportGraceSeconds = 7 * kSecondsPerDay;

// ---- Setup --------------------------------------------------------------------

struct TAKeys {
  TokenKeyPair token;  // gamma
  BBKeyPair set;       // y
};

struct PublicParameters {
  std::uint32_t max_ticket = 0;
  std::uint64_t deadline = 0;  // unix seconds; tokens are valid strictly before it
  G2 W;
  G1 W_prime;
  G2 Y;
  G1 hT;
  PaillierPublicKey paillier;
  SignedSet sigma;
  std::uint32_t threshold = 0, authorities = 0;

  // Sigma has max_ticket signatures under Y.
  bool consistent() const;
  // Pairing check of every set signature.
  bool verify_set(const GroupContext& ctx) const;

  Bytes serialize() const;
  static PublicParameters deserialize(ByteView b);
};

struct RevocationShare {
  ScalarShare elgamal;
  PaillierShare paillier;

  Bytes serialize() const;
  static RevocationShare deserialize(ByteView b);
};

struct SetupResult {
  PublicParameters pp;
  TAKeys ta;
  std::vector<RevocationShare> shares;
  // Dealer-side secrets, kept for tests and for direct-key oracles.
  Scalar xT;
  PaillierKeyPair paillier;
};

// Throws kInvalidArgument for max_ticket = 0 or a bad threshold.
SetupResult setup(const GroupContext& ctx, std::uint32_t max_ticket, std::uint64_t deadline, std::uint32_t t,
                  std::uint32_t n, Rng& rng, std::size_t paillier_bits = kMinPaillierBits);

// ---- Registration ---------------------------------------------------------------

struct UserKeys {
  std::string id;
  Scalar x;
  G1 hU;  // gU^x

  static UserKeys generate(const GroupContext& ctx, std::string id, Rng& rng);
  Bytes serialize() const;
  static UserKeys deserialize(ByteView b);
};

// What the TA keeps once the token has been issued.
struct TokenView {
  G1 A;
  PaillierCiphertext C0;
  Scalar s2;
  G1 c;  // g1^s
  ProofBundle mu;
};

struct RegistrationRecord {
  std::string id;
  G1 hU;
  std::optional<TokenView> token;

  Bytes serialize() const;
  static RegistrationRecord deserialize(ByteView b);
};

struct RegistrationHello {
  std::string id;
  G1 hU;
  Bytes serialize() const;
  static RegistrationHello deserialize(ByteView b);
};
struct RegistrationChallenge {
  Bytes rc;  // 32 random bytes
  Bytes serialize() const { return rc; }
  static RegistrationChallenge deserialize(ByteView b);
};
struct RegistrationResponse {
  ProofBundle sig;  // Schnorr under hU on rc
  Bytes serialize() const { return sig.serialize(); }
  static RegistrationResponse deserialize(ByteView b) { return {ProofBundle::deserialize(b)}; }
};

RegistrationChallenge registration_challenge(Rng& rng);
RegistrationResponse registration_respond(const GroupContext& ctx, const UserKeys& user,
                                          const RegistrationChallenge& ch, Rng& rng);
// Throws kDuplicateUser or kBadSignature; db is only appended to on success.
const RegistrationRecord& registration_accept(const GroupContext& ctx, std::vector<RegistrationRecord>& db,
                                              const RegistrationHello& hello, const RegistrationChallenge& ch,
                                              const RegistrationResponse& resp);
// All three moves in one call.
const RegistrationRecord& register_user(const GroupContext& ctx, const UserKeys& user,
                                        std::vector<RegistrationRecord>& db, Rng& rng);

RegistrationRecord* find_user(std::vector<RegistrationRecord>& db, std::string_view id);
const RegistrationRecord* find_user(const std::vector<RegistrationRecord>& db, std::string_view id);

// ---- Permission token --------------------------------------------------------------

struct PermissionToken {
  G1 A;
  Scalar r;
  Scalar s;
  std::uint32_t max_ticket = 0;
  std::uint64_t deadline = 0;
  std::set<std::uint32_t> used;

  Bytes serialize() const;
  static PermissionToken deserialize(ByteView b);
};

struct TokenRequestMsg {
  std::string id;
  G1 com;  // g1^s1
  PaillierCiphertext C0;
  PaillierPedersenProof pi1;
  Bytes serialize() const;
  static TokenRequestMsg deserialize(ByteView b);
};
struct TokenIssueMsg {
  G1 A;
  Scalar r;
  G1 g1_s2;
  ProofBundle pi2;
  Bytes serialize() const;
  static TokenIssueMsg deserialize(ByteView b);
};
struct TokenConfirmMsg {
  ProofBundle mu;
  Bytes serialize() const { return mu.serialize(); }
  static TokenConfirmMsg deserialize(ByteView b) { return {ProofBundle::deserialize(b)}; }
};
struct TokenReleaseMsg {
  Scalar s2;
  Bytes serialize() const;
  static TokenReleaseMsg deserialize(ByteView b);
};

// encode(A) || encode(g1^s1) || encode(g1^s2)
Bytes token_confirmation_message(const G1& A, const G1& g1_s1, const G1& g1_s2);

// User side of the token request. Verification failures throw with a
// "token request:" prefix and leave the user without a token.
class TokenRequester {
 public:
  TokenRequester(const GroupContext& ctx, const PublicParameters& pp, const UserKeys& user);
  TokenRequestMsg start(Rng& rng);
  // Checks pi2 (pairing-free) and signs mu.
  TokenConfirmMsg on_issue(const TokenIssueMsg& msg, Rng& rng);
  PermissionToken on_release(const TokenReleaseMsg& msg);

 private:
  const GroupContext& ctx_;
  const PublicParameters& pp_;
  const UserKeys& user_;
  Scalar s1_;
  G1 com_;
  std::optional<TokenIssueMsg> issue_;
  std::optional<Scalar> s2_;
};

// TA side. Nothing is written to db until the confirmation verifies.
class TokenIssuer {
 public:
  TokenIssuer(const GroupContext& ctx, const PublicParameters& pp, const TAKeys& keys,
              std::vector<RegistrationRecord>& db);
  // Throws kUnknownUser, kInvalidArgument (token already issued) or kBadProof.
  TokenIssueMsg on_request(const TokenRequestMsg& msg, Rng& rng);
  // Throws kBadSignature; on success stores the view and releases s2.
  TokenReleaseMsg on_confirm(const TokenConfirmMsg& msg);

 private:
  const GroupContext& ctx_;
  const PublicParameters& pp_;
  const TAKeys& keys_;
  std::vector<RegistrationRecord>& db_;
  std::optional<TokenRequestMsg> request_;
  std::optional<TokenIssueMsg> issued_;
  Scalar s2_;
};

PermissionToken token_request(const GroupContext& ctx, const PublicParameters& pp, const UserKeys& user,
                              const TAKeys& keys, std::vector<RegistrationRecord>& db, Rng& rng);

// ---- Tickets ---------------------------------------------------------------------

enum class TicketForm { kFull, kCompact };  // compact omits C and D

struct TicketProof {
  std::optional<G1> C;
  G1 B0, T1, T2;  // T', T''
  G1 com, B;
  std::optional<G1> D;
  Scalar c;
  // s1, s2, s3, w1, w2, w3, w4, w5, w6, w8, w10, w11, w12
  std::array<Scalar, kTicketWitnesses> responses;
  friend bool operator==(const TicketProof&, const TicketProof&) = default;
};

struct MTicket {
  G1 Bk;
  ElGamalCiphertext E;
  TicketProof pi;

  // Bk | C1 | C2 | [C] | B0 | T' | T'' | Com | B | [D] | c | 13 responses.
  // 778 bytes in full form, 712 in compact form.
  Bytes serialize() const;
  static MTicket deserialize(ByteView b);
  friend bool operator==(const MTicket&, const MTicket&) = default;
};

// gt^(1/(s+k+1)); throws kDegenerateExponent when s + k + 1 = 0.
G1 serial_number(const GroupContext& ctx, const Scalar& s, std::uint32_t k);

// Smallest index neither used nor reserved by a pending session.
std::optional<std::uint32_t> next_unused_index(const PermissionToken& token,
                                               const std::set<std::uint32_t>& reserved = {});

class TicketSession;
namespace detail {
TicketSession fork_session(const TicketSession& s);
// Witnesses in response order, for extraction tests.
std::array<Scalar, kTicketWitnesses> session_witness(const TicketSession& s, const PermissionToken& token);
}  // namespace detail

// Everything of a ticket that does not depend on the validator's challenge.
class TicketSession {
 public:
  // Throws kIndexOutOfRange, kIndexAlreadyUsed, kTokenExpired (never for
  // precompute) or kDegenerateExponent when s + k + 1 = 0.
  static TicketSession precompute(const GroupContext& ctx, const PublicParameters& pp, const PermissionToken& token,
                                  std::uint32_t k, Rng& rng);

  TicketSession(TicketSession&&) = default;
  TicketSession& operator=(TicketSession&&) = default;

  std::uint32_t index() const { return index_; }
  bool consumed() const { return consumed_; }
  const G1& serial() const { return points_[0]; }

  // 24 scalars | 10 points | prefix digest = 1130 bytes.
  Bytes serialize() const;
  static TicketSession deserialize(ByteView b);

 private:
  TicketSession() = default;
  TicketSession(const TicketSession&) = default;
  friend TicketSession detail::fork_session(const TicketSession&);
  friend std::array<Scalar, kTicketWitnesses> detail::session_witness(const TicketSession&, const PermissionToken&);
  friend MTicket ticket_issue(TicketSession&, PermissionToken&, const Scalar&, std::uint64_t, TicketForm);
  friend struct Report report_unused(const GroupContext&, const PublicParameters&, PermissionToken&, std::uint64_t,
                                     Rng&);

  // The response step without the quota and deadline checks.
  MTicket respond(PermissionToken& token, const Scalar& ch, TicketForm form);

  // k, nu, l, a, r2, beta, alpha, r3, r5, delta, f
  std::array<Scalar, 11> witness_;
  std::array<Scalar, kTicketWitnesses> masks_;
  // Bk, C1, C2, C, B0, T', T'', Com, B, D
  std::array<G1, 10> points_;
  Digest prefix_{};
  std::uint32_t index_ = 0;
  bool consumed_ = false;
};

// Real-time part: one hash and 13 multiply-adds, no group operations. Marks
// k used. Throws kSessionConsumed, kQuotaExhausted, kTokenExpired or
// kIndexAlreadyUsed.
MTicket ticket_issue(TicketSession& session, PermissionToken& token, const Scalar& ch, std::uint64_t now,
                     TicketForm form = TicketForm::kFull);

struct VerifierSecretKeys {
  Scalar gamma;
  Scalar y;
};
struct VerifierPublic {};
using VerifyMode = std::variant<VerifierSecretKeys, VerifierPublic>;

struct Verdict {
  bool ok = false;
  std::string failed_check;  // empty when ok
  explicit operator bool() const { return ok; }
};

// Secret-key mode: no pairings. Public mode: exactly four.
Verdict ticket_verify(const GroupContext& ctx, const PublicParameters& pp, const MTicket& ticket, const Scalar& ch,
                      const VerifyMode& mode);

// The ten proven equations, witnesses in response order.
RepStatement ticket_statement(const GroupContext& ctx, const PublicParameters& pp, const G1& Bk,
                              const ElGamalCiphertext& E, const G1& C, const G1& B0, const G1& T1, const G1& T2,
                              const G1& com, const G1& B, const G1& D);
// The proof as a generic bundle (commitments recomputed), C and D required.
ProofBundle ticket_bundle(const GroupContext& ctx, const PublicParameters& pp, const MTicket& ticket);

// ---- Validator authentication -------------------------------------------------------

struct AuthChallenge {
  Bytes rc;  // 32 bytes
  Bytes serialize() const { return rc; }
  static AuthChallenge deserialize(ByteView b);
};
struct AuthResponse {
  std::uint64_t ts = 0;
  Bytes signature;
  bool keys_held = false;  // tells the card it may omit C and D
  Bytes serialize() const;
  static AuthResponse deserialize(ByteView b);
};

// RC_V || u64 TS
Bytes validator_auth_message(const AuthChallenge& ch, std::uint64_t ts);
// Throws kQuotaExhausted when the token has nothing left to spend.
AuthChallenge validator_auth_challenge(const PermissionToken& token, Rng& rng);
AuthResponse validator_auth_respond(const RsaKeyPair& key, const AuthChallenge& ch, std::uint64_t ts,
                                    bool keys_held);
// Card side: key shape, signature, TS < deadline, quota.
void validator_auth_check(const RsaPublicKey& validator, const AuthChallenge& ch, const AuthResponse& resp,
                          const PermissionToken& token);

// ---- Revocation ------------------------------------------------------------------------

struct UsedTicketRecord {
  MTicket ticket;
  Scalar ch;  // kept so the record can be re-verified
  std::string validator_id;
  std::uint64_t dt = 0;

  Bytes serialize() const;
  static UsedTicketRecord deserialize(ByteView b);
};

inline constexpr std::string_view kReportValidatorId = "REPORT";

// Partials from at least t authorities. Throws kInsufficientShares.
G1 revocation_decrypt_ticket(std::span<const RevocationShare> shares, const MTicket& ticket);
Scalar revocation_decrypt_s1(const PublicParameters& pp, std::span<const RevocationShare> shares,
                             const TokenView& view);

std::optional<std::string> ident_user(const PublicParameters& pp, std::span<const RevocationShare> shares,
                                      const std::vector<RegistrationRecord>& db, const MTicket& ticket);
// Serial numbers of every ticket of the user, k = 1..max_ticket.
std::vector<G1> ident_ticket(const GroupContext& ctx, const PublicParameters& pp,
                             std::span<const RevocationShare> shares, const RegistrationRecord& record);
std::size_t ident_duplicate(const G1& Bk, const std::vector<UsedTicketRecord>& db);

// ---- Reporting ---------------------------------------------------------------------------

// ch = H("mtkt/report/v1", [Bk, u64 day])
Scalar report_challenge(const G1& Bk, std::uint64_t day);

struct Report {
  std::uint64_t day = 0;
  std::vector<MTicket> tickets;

  // u64 day | u32 count | count x blob(ticket)
  Bytes serialize() const;
  static Report deserialize(ByteView b);
};

// One full ticket per unused index, all indices then marked used. Throws
// kTokenExpired after the grace period.
Report report_unused(const GroupContext& ctx, const PublicParameters& pp, PermissionToken& token, std::uint64_t now,
                     Rng& rng);
// Every ticket verifies under its report challenge.
Verdict report_verify(const GroupContext& ctx, const PublicParameters& pp, const Report& report,
                      const VerifyMode& mode);

}  // namespace mtkt
