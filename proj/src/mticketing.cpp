#include "mtkt/mticketing.hpp"

#include <algorithm>

#include "mtkt/error.hpp"
#include "mtkt/sha256.hpp"

namespace mtkt {

namespace {

constexpr std::string_view kValidateTag = "mtkt/validate/v1";
constexpr std::string_view kReportTag = "mtkt/report/v1";
constexpr std::uint8_t kParamsVersion = 1;

// witness indices
enum : std::size_t { kK, kNu, kL, kA, kS, kR2, kBeta, kAlpha, kR, kR3, kR5, kDelta, kF };

void write_g1(ByteWriter& w, const G1& p) { w.raw(p.encode()); }
G1 read_g1(ByteReader& r) { return G1::decode(r.raw(kG1Bytes)); }
void write_g2(ByteWriter& w, const G2& p) { w.raw(p.encode()); }
G2 read_g2(ByteReader& r) { return G2::decode(r.raw(kG2Bytes)); }
void write_scalar(ByteWriter& w, const Scalar& s) { w.raw(encode_scalar(s)); }
Scalar read_scalar(ByteReader& r) { return decode_scalar(r.raw(kScalarBytes)); }

Bytes read_fixed(ByteView b, std::size_t n, const char* what) {
  if (b.size() != n) throw Error(ErrorCode::kDecode, std::string(what) + " must be " + std::to_string(n) + " bytes");
  return Bytes(b.begin(), b.end());
}

Digest prefix_digest(const G1& C, const ElGamalCiphertext& E, const G1& B0, const G1& T1, const G1& T2, const G1& com,
                     const G1& B, const G1& D, const G1& K, std::span<const GroupElement> commitments) {
  Sha256 h;
  h.update(kValidateTag);
  auto put = [&](const G1& p) {
    auto enc = p.encode();
    std::uint8_t len[4] = {0, 0, 0, static_cast<std::uint8_t>(enc.size())};
    h.update(ByteView(len, 4));
    h.update(enc);
  };
  for (const G1* p : {&C, &E.C1, &E.C2, &B0, &T1, &T2, &com, &B, &D, &K}) put(*p);
  for (const auto& c : commitments) put(std::get<G1>(c));
  return h.finish();
}

Scalar final_challenge(const Digest& prefix, const Scalar& ch) {
  auto enc = encode_scalar(ch);
  return hash_to_scalar(kValidateTag, {ByteView(prefix), ByteView(enc)});
}

std::uint32_t scalar_index(const Scalar& k) {
  mpz_class v = scalar_to_mpz(k);
  if (v < 1 || v > UINT32_MAX) throw Error(ErrorCode::kDecode, "ticket index out of range");
  return static_cast<std::uint32_t>(v.get_ui());
}

Verdict reject(std::string check) { return {false, std::move(check)}; }

}  // namespace

// ---- Setup --------------------------------------------------------------------

bool PublicParameters::consistent() const {
  return max_ticket >= 1 && sigma.max_ticket == max_ticket && sigma.signatures.size() == max_ticket && sigma.Y == Y;
}

bool PublicParameters::verify_set(const GroupContext& ctx) const {
  if (!consistent()) return false;
  for (std::uint32_t k = 1; k <= max_ticket; ++k) {
    if (!bb_verify_pairing(ctx, Y, Scalar::from_u64(k), sigma.signature(k))) return false;
  }
  return true;
}

Bytes PublicParameters::serialize() const {
  ByteWriter w;
  w.u8(kParamsVersion);
  w.u32(max_ticket);
  w.u64(deadline);
  write_g2(w, W);
  write_g1(w, W_prime);
  write_g2(w, Y);
  write_g1(w, hT);
  w.blob(paillier.serialize());
  w.blob(sigma.serialize());
  w.u32(threshold);
  w.u32(authorities);
  return std::move(w).take();
}

PublicParameters PublicParameters::deserialize(ByteView b) {
  ByteReader r(b);
  if (r.u8() != kParamsVersion) throw Error(ErrorCode::kDecode, "unknown parameter version");
  PublicParameters pp;
  pp.max_ticket = r.u32();
  pp.deadline = r.u64();
  pp.W = read_g2(r);
  pp.W_prime = read_g1(r);
  pp.Y = read_g2(r);
  pp.hT = read_g1(r);
  pp.paillier = PaillierPublicKey::deserialize(r.blob());
  pp.sigma = SignedSet::deserialize(r.blob());
  pp.threshold = r.u32();
  pp.authorities = r.u32();
  r.expect_done();
  if (!pp.consistent()) throw Error(ErrorCode::kDecode, "signed set does not match parameters");
  return pp;
}

Bytes RevocationShare::serialize() const {
  ByteWriter w;
  w.blob(elgamal.serialize());
  w.blob(paillier.serialize());
  return std::move(w).take();
}

RevocationShare RevocationShare::deserialize(ByteView b) {
  ByteReader r(b);
  RevocationShare s;
  s.elgamal = ScalarShare::deserialize(r.blob());
  s.paillier = PaillierShare::deserialize(r.blob());
  r.expect_done();
  return s;
}

SetupResult setup(const GroupContext& ctx, std::uint32_t max_ticket, std::uint64_t deadline, std::uint32_t t,
                  std::uint32_t n, Rng& rng, std::size_t paillier_bits) {
  if (max_ticket < 1) throw Error(ErrorCode::kInvalidArgument, "max_ticket must be at least 1");
  if (t < 1 || t > n) throw Error(ErrorCode::kInvalidArgument, "threshold must satisfy 1 <= t <= n");
  SetupResult out;
  out.ta.token = TokenKeyPair::generate(ctx, rng);
  while (true) {
    out.ta.set = BBKeyPair::generate(ctx, rng);
    try {
      out.pp.sigma = issue_set(ctx, out.ta.set.y, max_ticket);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateExponent) throw;
    }
  }
  auto elgamal = ElGamalKeys::generate(ctx, t, n, rng);
  out.paillier = PaillierKeyPair::generate(rng, paillier_bits);
  auto pshares = paillier_share(out.paillier, t, n, rng);
  for (std::uint32_t i = 0; i < n; ++i) out.shares.push_back({elgamal.shares[i], pshares[i]});
  out.xT = elgamal.xT;

  auto& pp = out.pp;
  pp.max_ticket = max_ticket;
  pp.deadline = deadline;
  pp.W = out.ta.token.W;
  pp.W_prime = out.ta.token.W_prime;
  pp.Y = out.ta.set.Y;
  pp.hT = elgamal.hT;
  pp.paillier = out.paillier.pk;
  pp.threshold = t;
  pp.authorities = n;
  return out;
}

// ---- Registration ---------------------------------------------------------------

UserKeys UserKeys::generate(const GroupContext& ctx, std::string id, Rng& rng) {
  Scalar x = random_nonzero_scalar(rng);
  return {std::move(id), x, ctx.gens().gU.pow(x)};
}

Bytes UserKeys::serialize() const {
  ByteWriter w;
  w.str(id);
  write_scalar(w, x);
  write_g1(w, hU);
  return std::move(w).take();
}

UserKeys UserKeys::deserialize(ByteView b) {
  ByteReader r(b);
  UserKeys u;
  u.id = r.str();
  u.x = read_scalar(r);
  u.hU = read_g1(r);
  r.expect_done();
  return u;
}

Bytes RegistrationRecord::serialize() const {
  ByteWriter w;
  w.str(id);
  write_g1(w, hU);
  w.u8(token ? 1 : 0);
  if (token) {
    write_g1(w, token->A);
    write_mpz(w, token->C0.value);
    write_scalar(w, token->s2);
    write_g1(w, token->c);
    w.blob(token->mu.serialize());
  }
  return std::move(w).take();
}

RegistrationRecord RegistrationRecord::deserialize(ByteView b) {
  ByteReader r(b);
  RegistrationRecord rec;
  rec.id = r.str();
  rec.hU = read_g1(r);
  std::uint8_t has = r.u8();
  if (has > 1) throw Error(ErrorCode::kDecode, "bad token flag");
  if (has) {
    TokenView v;
    v.A = read_g1(r);
    v.C0.value = read_mpz(r);
    v.s2 = read_scalar(r);
    v.c = read_g1(r);
    v.mu = ProofBundle::deserialize(r.blob());
    rec.token = std::move(v);
  }
  r.expect_done();
  return rec;
}

Bytes RegistrationHello::serialize() const {
  ByteWriter w;
  w.str(id);
  write_g1(w, hU);
  return std::move(w).take();
}

RegistrationHello RegistrationHello::deserialize(ByteView b) {
  ByteReader r(b);
  RegistrationHello h;
  h.id = r.str();
  h.hU = read_g1(r);
  r.expect_done();
  return h;
}

RegistrationChallenge RegistrationChallenge::deserialize(ByteView b) { return {read_fixed(b, 32, "challenge")}; }

RegistrationChallenge registration_challenge(Rng& rng) { return {rng.bytes(32)}; }

RegistrationResponse registration_respond(const GroupContext& ctx, const UserKeys& user,
                                          const RegistrationChallenge& ch, Rng& rng) {
  return {schnorr_sign(ctx, user.x, user.hU, ch.rc, rng)};
}

RegistrationRecord* find_user(std::vector<RegistrationRecord>& db, std::string_view id) {
  auto it = std::find_if(db.begin(), db.end(), [&](const RegistrationRecord& r) { return r.id == id; });
  return it == db.end() ? nullptr : &*it;
}

const RegistrationRecord* find_user(const std::vector<RegistrationRecord>& db, std::string_view id) {
  return find_user(const_cast<std::vector<RegistrationRecord>&>(db), id);
}

const RegistrationRecord& registration_accept(const GroupContext& ctx, std::vector<RegistrationRecord>& db,
                                              const RegistrationHello& hello, const RegistrationChallenge& ch,
                                              const RegistrationResponse& resp) {
  if (find_user(db, hello.id)) throw Error(ErrorCode::kDuplicateUser, "user already registered: " + hello.id);
  if (hello.hU.is_identity() || !schnorr_verify(ctx, hello.hU, ch.rc, resp.sig)) {
    throw Error(ErrorCode::kBadSignature, "registration: signature on rc rejected");
  }
  db.push_back({hello.id, hello.hU, std::nullopt});
  return db.back();
}

const RegistrationRecord& register_user(const GroupContext& ctx, const UserKeys& user,
                                        std::vector<RegistrationRecord>& db, Rng& rng) {
  auto ch = registration_challenge(rng);
  return registration_accept(ctx, db, {user.id, user.hU}, ch, registration_respond(ctx, user, ch, rng));
}

// ---- Permission token --------------------------------------------------------------

Bytes PermissionToken::serialize() const {
  ByteWriter w;
  write_g1(w, A);
  write_scalar(w, r);
  write_scalar(w, s);
  w.u32(max_ticket);
  w.u64(deadline);
  w.u32(static_cast<std::uint32_t>(used.size()));
  for (auto k : used) w.u32(k);
  return std::move(w).take();
}

PermissionToken PermissionToken::deserialize(ByteView b) {
  ByteReader r(b);
  PermissionToken t;
  t.A = read_g1(r);
  t.r = read_scalar(r);
  t.s = read_scalar(r);
  t.max_ticket = r.u32();
  t.deadline = r.u64();
  std::uint32_t n = r.u32();
  if (n > t.max_ticket) throw Error(ErrorCode::kDecode, "more used indices than max_ticket");
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint32_t k = r.u32();
    if (k < 1 || k > t.max_ticket || !t.used.insert(k).second) throw Error(ErrorCode::kDecode, "bad used index");
  }
  r.expect_done();
  return t;
}

Bytes TokenRequestMsg::serialize() const {
  ByteWriter w;
  w.str(id);
  write_g1(w, com);
  write_mpz(w, C0.value);
  w.blob(pi1.serialize());
  return std::move(w).take();
}

TokenRequestMsg TokenRequestMsg::deserialize(ByteView b) {
  ByteReader r(b);
  TokenRequestMsg m;
  m.id = r.str();
  m.com = read_g1(r);
  m.C0.value = read_mpz(r);
  m.pi1 = PaillierPedersenProof::deserialize(r.blob());
  r.expect_done();
  return m;
}

Bytes TokenIssueMsg::serialize() const {
  ByteWriter w;
  write_g1(w, A);
  write_scalar(w, r);
  write_g1(w, g1_s2);
  w.blob(pi2.serialize());
  return std::move(w).take();
}

TokenIssueMsg TokenIssueMsg::deserialize(ByteView b) {
  ByteReader r(b);
  TokenIssueMsg m;
  m.A = read_g1(r);
  m.r = read_scalar(r);
  m.g1_s2 = read_g1(r);
  m.pi2 = ProofBundle::deserialize(r.blob());
  r.expect_done();
  return m;
}

Bytes TokenReleaseMsg::serialize() const {
  auto e = encode_scalar(s2);
  return Bytes(e.begin(), e.end());
}

TokenReleaseMsg TokenReleaseMsg::deserialize(ByteView b) { return {decode_scalar(b)}; }

Bytes token_confirmation_message(const G1& A, const G1& g1_s1, const G1& g1_s2) {
  Bytes out;
  append(out, A.encode());
  append(out, g1_s1.encode());
  append(out, g1_s2.encode());
  return out;
}

TokenRequester::TokenRequester(const GroupContext& ctx, const PublicParameters& pp, const UserKeys& user)
    : ctx_(ctx), pp_(pp), user_(user) {}

TokenRequestMsg TokenRequester::start(Rng& rng) {
  s1_ = random_nonzero_scalar(rng);
  com_ = ctx_.gens().g1.pow(s1_);
  mpz_class j = paillier_random_unit(pp_.paillier, rng);
  auto c0 = paillier_encrypt(pp_.paillier, scalar_to_mpz(s1_), j);
  auto pi1 = pi1_prove(ctx_, pp_.paillier, s1_, j, com_, c0, rng);
  issue_.reset();
  return {user_.id, com_, c0, pi1};
}

TokenConfirmMsg TokenRequester::on_issue(const TokenIssueMsg& msg, Rng& rng) {
  if (com_.is_identity()) throw Error(ErrorCode::kInvalidArgument, "token request: not started");
  if (msg.g1_s2.is_identity()) throw Error(ErrorCode::kBadProof, "token request: g1^s2 is the identity");
  G1 c = com_ * msg.g1_s2;
  if (!extended_bb_verify_issue(ctx_, pp_.W_prime, c, {msg.A, msg.r, msg.pi2})) {
    throw Error(ErrorCode::kBadProof, "token request: issuer proof rejected");
  }
  issue_ = msg;
  return {schnorr_sign(ctx_, user_.x, user_.hU, token_confirmation_message(msg.A, com_, msg.g1_s2), rng)};
}

PermissionToken TokenRequester::on_release(const TokenReleaseMsg& msg) {
  if (!issue_) throw Error(ErrorCode::kInvalidArgument, "token request: no issued token to complete");
  if (ctx_.gens().g1.pow(msg.s2) != issue_->g1_s2) {
    throw Error(ErrorCode::kBadProof, "token request: released s2 does not match g1^s2");
  }
  PermissionToken t;
  t.A = issue_->A;
  t.r = issue_->r;
  t.s = s1_ + msg.s2;
  t.max_ticket = pp_.max_ticket;
  t.deadline = pp_.deadline;
  issue_.reset();
  return t;
}

TokenIssuer::TokenIssuer(const GroupContext& ctx, const PublicParameters& pp, const TAKeys& keys,
                         std::vector<RegistrationRecord>& db)
    : ctx_(ctx), pp_(pp), keys_(keys), db_(db) {}

TokenIssueMsg TokenIssuer::on_request(const TokenRequestMsg& msg, Rng& rng) {
  const RegistrationRecord* rec = find_user(db_, msg.id);
  if (!rec) throw Error(ErrorCode::kUnknownUser, "token request: unknown user " + msg.id);
  if (rec->token) throw Error(ErrorCode::kInvalidArgument, "token request: token already issued to " + msg.id);
  if (msg.com.is_identity() || !pi1_verify(ctx_, pp_.paillier, msg.com, msg.C0, msg.pi1)) {
    throw Error(ErrorCode::kBadProof, "token request: pi1 rejected");
  }
  s2_ = random_nonzero_scalar(rng);
  G1 g1_s2 = ctx_.gens().g1.pow(s2_);
  auto issue = extended_bb_issue(ctx_, keys_.token, msg.com * g1_s2, rng);
  request_ = msg;
  issued_ = TokenIssueMsg{issue.A, issue.r, g1_s2, issue.pi2};
  return *issued_;
}

TokenReleaseMsg TokenIssuer::on_confirm(const TokenConfirmMsg& msg) {
  if (!issued_) throw Error(ErrorCode::kInvalidArgument, "token request: nothing issued");
  RegistrationRecord* rec = find_user(db_, request_->id);
  if (!rec || rec->token) throw Error(ErrorCode::kInvalidArgument, "token request: registration changed");
  Bytes m = token_confirmation_message(issued_->A, request_->com, issued_->g1_s2);
  if (!schnorr_verify(ctx_, rec->hU, m, msg.mu)) {
    throw Error(ErrorCode::kBadSignature, "token request: confirmation signature rejected");
  }
  rec->token = TokenView{issued_->A, request_->C0, s2_, request_->com * issued_->g1_s2, msg.mu};
  issued_.reset();
  request_.reset();
  return {s2_};
}

PermissionToken token_request(const GroupContext& ctx, const PublicParameters& pp, const UserKeys& user,
                              const TAKeys& keys, std::vector<RegistrationRecord>& db, Rng& rng) {
  TokenRequester u(ctx, pp, user);
  TokenIssuer ta(ctx, pp, keys, db);
  auto issue = ta.on_request(u.start(rng), rng);
  auto confirm = u.on_issue(issue, rng);
  return u.on_release(ta.on_confirm(confirm));
}

// ---- Tickets ---------------------------------------------------------------------

G1 serial_number(const GroupContext& ctx, const Scalar& s, std::uint32_t k) {
  Scalar e = s + Scalar::from_u64(k) + Scalar::one();
  if (e.is_zero()) throw Error(ErrorCode::kDegenerateExponent, "s + k + 1 = 0");
  return ctx.gens().gt.pow(e.inverse());
}

std::optional<std::uint32_t> next_unused_index(const PermissionToken& token, const std::set<std::uint32_t>& reserved) {
  for (std::uint32_t k = 1; k <= token.max_ticket; ++k) {
    if (!token.used.count(k) && !reserved.count(k)) return k;
  }
  return std::nullopt;
}

RepStatement ticket_statement(const GroupContext& ctx, const PublicParameters& pp, const G1& Bk,
                              const ElGamalCiphertext& E, const G1& C, const G1& B0, const G1& T1, const G1& T2,
                              const G1& com, const G1& B, const G1& D) {
  const auto& g = ctx.gens();
  G1 B_prime = B0.inverse();
  G1 B1 = B.inverse();
  G1 K = g.gt / Bk;
  G1 L = E.C2 * com;
  auto w = [](std::size_t i) { return std::variant<std::size_t, Scalar>(i); };
  RepStatement s;
  s.domain = std::string(kValidateTag);
  s.arity = kTicketWitnesses;
  s.equations = {
      {E.C1, {{g.gT, w(kA)}}},
      {E.C2, {{g.g1, w(kS)}, {pp.hT, w(kA)}}},
      {T1, {{g.G, w(kS)}, {g.H, w(kR2)}}},
      {T2, {{T1, w(kAlpha)}, {g.H, w(kR3)}}},
      {C, {{g.g1, w(kBeta)}, {g.h, w(kAlpha)}, {B_prime, w(kR)}}},
      {T2, {{g.G, w(kBeta)}, {g.H, w(kR5)}}},
      {com, {{g.g1, w(kK)}, {pp.hT, w(kNu)}}},
      {D, {{B1, w(kK)}, {g.g, w(kL)}}},
      {K, {{Bk, w(kDelta)}}},
      {L, {{g.g1, w(kDelta)}, {pp.hT, w(kF)}}},
  };
  return s;
}

TicketSession TicketSession::precompute(const GroupContext& ctx, const PublicParameters& pp,
                                        const PermissionToken& token, std::uint32_t k, Rng& rng) {
  if (k < 1 || k > token.max_ticket || k > pp.max_ticket) {
    throw Error(ErrorCode::kIndexOutOfRange, "ticket index " + std::to_string(k) + " outside [1.." +
                                                 std::to_string(token.max_ticket) + "]");
  }
  if (token.used.count(k)) throw Error(ErrorCode::kIndexAlreadyUsed, "ticket index " + std::to_string(k) + " used");
  const auto& g = ctx.gens();
  const Scalar& s = token.s;
  const Scalar& r = token.r;
  TicketSession t;
  t.index_ = k;
  auto& w = t.witness_;
  Scalar ks = Scalar::from_u64(k);
  G1 Bk = serial_number(ctx, s, k);

  Scalar a = random_nonzero_scalar(rng);
  ElGamalCiphertext E{g.gT.pow(a), G1::multi_pow(std::array{g.g1, pp.hT}, std::array{s, a})};

  Scalar alpha = random_nonzero_scalar(rng);
  Scalar beta = alpha * s;
  G1 B0 = token.A.pow(alpha);
  G1 C = G1::multi_pow(std::array{g.g1, g.h, B0.inverse()}, std::array{beta, alpha, r});

  Scalar r2 = random_nonzero_scalar(rng), r3 = random_nonzero_scalar(rng);
  G1 T1 = G1::multi_pow(std::array{g.G, g.H}, std::array{s, r2});
  G1 T2 = G1::multi_pow(std::array{T1, g.H}, std::array{alpha, r3});
  Scalar r5 = r3 + alpha * r2;

  Scalar nu = random_nonzero_scalar(rng);
  G1 com = G1::multi_pow(std::array{g.g1, pp.hT}, std::array{ks, nu});
  Scalar l = random_nonzero_scalar(rng);
  G1 B = pp.sigma.signature(k).pow(l);
  G1 D = G1::multi_pow(std::array{B.inverse(), g.g}, std::array{ks, l});

  w = {ks, nu, l, a, r2, beta, alpha, r3, r5, s + ks, a + nu};
  for (auto& m : t.masks_) m = random_nonzero_scalar(rng);
  t.points_ = {Bk, E.C1, E.C2, C, B0, T1, T2, com, B, D};

  auto stmt = ticket_statement(ctx, pp, Bk, E, C, B0, T1, T2, com, B, D);
  auto commitments = rep_commit(stmt, t.masks_);
  t.prefix_ = prefix_digest(C, E, B0, T1, T2, com, B, D, g.gt / Bk, commitments);
  return t;
}

Bytes TicketSession::serialize() const {
  ByteWriter w;
  for (const auto& s : witness_) write_scalar(w, s);
  for (const auto& s : masks_) write_scalar(w, s);
  for (const auto& p : points_) write_g1(w, p);
  w.raw(prefix_);
  return std::move(w).take();
}

TicketSession TicketSession::deserialize(ByteView b) {
  if (b.size() != kSessionBytes) throw Error(ErrorCode::kDecode, "ticket session must be 1130 bytes");
  ByteReader r(b);
  TicketSession t;
  for (auto& s : t.witness_) s = read_scalar(r);
  for (auto& s : t.masks_) s = read_scalar(r);
  for (auto& p : t.points_) p = read_g1(r);
  auto d = r.raw(32);
  std::copy(d.begin(), d.end(), t.prefix_.begin());
  t.index_ = scalar_index(t.witness_[0]);
  return t;
}

TicketSession detail::fork_session(const TicketSession& s) { return TicketSession(s); }

std::array<Scalar, kTicketWitnesses> detail::session_witness(const TicketSession& t, const PermissionToken& token) {
  const auto& w = t.witness_;
  return {w[0], w[1], w[2], w[3], token.s, w[4], w[5], w[6], token.r, w[7], w[8], w[9], w[10]};
}

MTicket TicketSession::respond(PermissionToken& token, const Scalar& ch, TicketForm form) {
  if (consumed_) throw Error(ErrorCode::kSessionConsumed, "ticket session already used");
  if (token.used.count(index_)) {
    throw Error(ErrorCode::kIndexAlreadyUsed, "ticket index " + std::to_string(index_) + " used");
  }
  Scalar c = final_challenge(prefix_, ch);
  auto witness = detail::session_witness(*this, token);
  MTicket out;
  for (std::size_t i = 0; i < kTicketWitnesses; ++i) out.pi.responses[i] = masks_[i] + c * witness[i];
  out.pi.c = c;
  const auto& p = points_;
  out.Bk = p[0];
  out.E = {p[1], p[2]};
  if (form == TicketForm::kFull) {
    out.pi.C = p[3];
    out.pi.D = p[9];
  }
  out.pi.B0 = p[4];
  out.pi.T1 = p[5];
  out.pi.T2 = p[6];
  out.pi.com = p[7];
  out.pi.B = p[8];
  token.used.insert(index_);
  consumed_ = true;
  return out;
}

MTicket ticket_issue(TicketSession& session, PermissionToken& token, const Scalar& ch, std::uint64_t now,
                     TicketForm form) {
  if (session.consumed()) throw Error(ErrorCode::kSessionConsumed, "ticket session already used");
  if (token.used.size() >= token.max_ticket) {
    throw Error(ErrorCode::kQuotaExhausted, "all " + std::to_string(token.max_ticket) + " tickets used");
  }
  if (now >= token.deadline) throw Error(ErrorCode::kTokenExpired, "permission token expired");
  return session.respond(token, ch, form);
}

Bytes MTicket::serialize() const {
  ByteWriter w;
  write_g1(w, Bk);
  write_g1(w, E.C1);
  write_g1(w, E.C2);
  if (pi.C.has_value() != pi.D.has_value()) throw Error(ErrorCode::kInvalidArgument, "C and D travel together");
  if (pi.C) write_g1(w, *pi.C);
  write_g1(w, pi.B0);
  write_g1(w, pi.T1);
  write_g1(w, pi.T2);
  write_g1(w, pi.com);
  write_g1(w, pi.B);
  if (pi.D) write_g1(w, *pi.D);
  write_scalar(w, pi.c);
  for (const auto& s : pi.responses) write_scalar(w, s);
  return std::move(w).take();
}

MTicket MTicket::deserialize(ByteView b) {
  bool full;
  if (b.size() == kTicketBytes) {
    full = true;
  } else if (b.size() == kCompactTicketBytes) {
    full = false;
  } else {
    throw Error(ErrorCode::kDecode, "ticket must be 778 or 712 bytes, got " + std::to_string(b.size()));
  }
  ByteReader r(b);
  MTicket t;
  t.Bk = read_g1(r);
  t.E.C1 = read_g1(r);
  t.E.C2 = read_g1(r);
  if (full) t.pi.C = read_g1(r);
  t.pi.B0 = read_g1(r);
  t.pi.T1 = read_g1(r);
  t.pi.T2 = read_g1(r);
  t.pi.com = read_g1(r);
  t.pi.B = read_g1(r);
  if (full) t.pi.D = read_g1(r);
  t.pi.c = read_scalar(r);
  for (auto& s : t.pi.responses) s = read_scalar(r);
  r.expect_done();
  return t;
}

Verdict ticket_verify(const GroupContext& ctx, const PublicParameters& pp, const MTicket& ticket, const Scalar& ch,
                      const VerifyMode& mode) {
  const auto& pi = ticket.pi;
  if (pi.B.is_identity()) return reject("B != 1");
  if (pi.B0.is_identity()) return reject("B0 != 1");
  G1 C, D;
  if (const auto* keys = std::get_if<VerifierSecretKeys>(&mode)) {
    D = pi.B.pow(keys->y);
    if (pi.D && *pi.D != D) return reject("D = B^y");
    C = pi.B0.pow(keys->gamma);
    if (pi.C && *pi.C != C) return reject("C = B0^gamma");
  } else {
    if (!pi.C || !pi.D) return reject("C and D present");
    C = *pi.C;
    D = *pi.D;
    const auto& g = ctx.gens();
    if (ctx.pair(D, g.g3) != ctx.pair(pi.B, pp.Y)) return reject("e(D, g3) = e(B, Y)");
    if (ctx.pair(C, g.g2) != ctx.pair(pi.B0, pp.W)) return reject("e(C, g2) = e(B0, W)");
  }
  auto stmt = ticket_statement(ctx, pp, ticket.Bk, ticket.E, C, pi.B0, pi.T1, pi.T2, pi.com, pi.B, D);
  auto tilde = rep_recompute(stmt, pi.responses, pi.c);
  Digest prefix = prefix_digest(C, ticket.E, pi.B0, pi.T1, pi.T2, pi.com, pi.B, D, std::get<G1>(stmt.equations[8].target),
                                tilde);
  if (final_challenge(prefix, ch) != pi.c) return reject("challenge");
  return {true, {}};
}

ProofBundle ticket_bundle(const GroupContext& ctx, const PublicParameters& pp, const MTicket& ticket) {
  const auto& pi = ticket.pi;
  if (!pi.C || !pi.D) throw Error(ErrorCode::kInvalidArgument, "bundle needs the full ticket form");
  auto stmt = ticket_statement(ctx, pp, ticket.Bk, ticket.E, *pi.C, pi.B0, pi.T1, pi.T2, pi.com, pi.B, *pi.D);
  ProofBundle b;
  b.responses.assign(pi.responses.begin(), pi.responses.end());
  b.challenge = pi.c;
  b.commitments = rep_recompute(stmt, b.responses, pi.c);
  b.statement_digest = stmt.digest();
  return b;
}

// ---- Validator authentication -------------------------------------------------------

AuthChallenge AuthChallenge::deserialize(ByteView b) { return {read_fixed(b, 32, "validator nonce")}; }

Bytes AuthResponse::serialize() const {
  ByteWriter w;
  w.u64(ts);
  w.u8(keys_held ? 1 : 0);
  w.blob(signature);
  return std::move(w).take();
}

AuthResponse AuthResponse::deserialize(ByteView b) {
  ByteReader r(b);
  AuthResponse a;
  a.ts = r.u64();
  std::uint8_t flag = r.u8();
  if (flag > 1) throw Error(ErrorCode::kDecode, "bad keys flag");
  a.keys_held = flag == 1;
  a.signature = r.blob();
  r.expect_done();
  return a;
}

Bytes validator_auth_message(const AuthChallenge& ch, std::uint64_t ts) {
  ByteWriter w;
  w.raw(ch.rc);
  w.u64(ts);
  return std::move(w).take();
}

AuthChallenge validator_auth_challenge(const PermissionToken& token, Rng& rng) {
  if (token.used.size() >= token.max_ticket) {
    throw Error(ErrorCode::kQuotaExhausted, "all " + std::to_string(token.max_ticket) + " tickets used");
  }
  return {rng.bytes(32)};
}

AuthResponse validator_auth_respond(const RsaKeyPair& key, const AuthChallenge& ch, std::uint64_t ts,
                                    bool keys_held) {
  return {ts, rsa_sign(key, validator_auth_message(ch, ts)), keys_held};
}

void validator_auth_check(const RsaPublicKey& validator, const AuthChallenge& ch, const AuthResponse& resp,
                          const PermissionToken& token) {
  try {
    validator.require_validator_shape();
  } catch (const Error& e) {
    throw Error(ErrorCode::kBadValidatorSignature, e.what());
  }
  if (!rsa_verify(validator, validator_auth_message(ch, resp.ts), resp.signature)) {
    throw Error(ErrorCode::kBadValidatorSignature, "validator signature rejected");
  }
  if (resp.ts >= token.deadline) throw Error(ErrorCode::kTokenExpired, "validator time is past the token deadline");
  if (token.used.size() >= token.max_ticket) {
    throw Error(ErrorCode::kQuotaExhausted, "all " + std::to_string(token.max_ticket) + " tickets used");
  }
}

// ---- Revocation ------------------------------------------------------------------------

Bytes UsedTicketRecord::serialize() const {
  ByteWriter w;
  w.blob(ticket.serialize());
  write_scalar(w, ch);
  w.str(validator_id);
  w.u64(dt);
  return std::move(w).take();
}

UsedTicketRecord UsedTicketRecord::deserialize(ByteView b) {
  ByteReader r(b);
  UsedTicketRecord rec;
  rec.ticket = MTicket::deserialize(r.blob());
  rec.ch = read_scalar(r);
  rec.validator_id = r.str();
  rec.dt = r.u64();
  r.expect_done();
  return rec;
}

G1 revocation_decrypt_ticket(std::span<const RevocationShare> shares, const MTicket& ticket) {
  std::vector<ElGamalPartial> partials;
  for (const auto& s : shares) partials.push_back(elgamal_partial_decrypt(s.elgamal, ticket.E));
  return elgamal_combine(ticket.E, partials);
}

Scalar revocation_decrypt_s1(const PublicParameters& pp, std::span<const RevocationShare> shares,
                             const TokenView& view) {
  std::vector<PaillierPartial> partials;
  for (const auto& s : shares) partials.push_back(paillier_partial_decrypt(pp.paillier, s.paillier, view.C0));
  return scalar_from_mpz(paillier_combine(pp.paillier, partials));
}

std::optional<std::string> ident_user(const PublicParameters&, std::span<const RevocationShare> shares,
                                      const std::vector<RegistrationRecord>& db, const MTicket& ticket) {
  G1 g1s = revocation_decrypt_ticket(shares, ticket);
  for (const auto& rec : db) {
    if (rec.token && rec.token->c == g1s) return rec.id;
  }
  return std::nullopt;
}

std::vector<G1> ident_ticket(const GroupContext& ctx, const PublicParameters& pp,
                             std::span<const RevocationShare> shares, const RegistrationRecord& record) {
  if (!record.token) throw Error(ErrorCode::kInvalidArgument, "user " + record.id + " holds no token");
  Scalar s = revocation_decrypt_s1(pp, shares, *record.token) + record.token->s2;
  std::vector<G1> out;
  for (std::uint32_t k = 1; k <= pp.max_ticket; ++k) out.push_back(serial_number(ctx, s, k));
  return out;
}

std::size_t ident_duplicate(const G1& Bk, const std::vector<UsedTicketRecord>& db) {
  return static_cast<std::size_t>(
      std::count_if(db.begin(), db.end(), [&](const UsedTicketRecord& r) { return r.ticket.Bk == Bk; }));
}

// ---- Reporting ---------------------------------------------------------------------------

Scalar report_challenge(const G1& Bk, std::uint64_t day) {
  auto enc = Bk.encode();
  ByteWriter w;
  w.u64(day);
  return hash_to_scalar(kReportTag, {ByteView(enc), ByteView(w.bytes())});
}

Bytes Report::serialize() const {
  ByteWriter w;
  w.u64(day);
  w.u32(static_cast<std::uint32_t>(tickets.size()));
  for (const auto& t : tickets) w.blob(t.serialize());
  return std::move(w).take();
}

Report Report::deserialize(ByteView b) {
  ByteReader r(b);
  Report out;
  out.day = r.u64();
  std::uint32_t n = r.u32();
  if (n > r.remaining() / kCompactTicketBytes) throw Error(ErrorCode::kDecode, "report ticket count too large");
  for (std::uint32_t i = 0; i < n; ++i) out.tickets.push_back(MTicket::deserialize(r.blob()));
  r.expect_done();
  return out;
}

Report report_unused(const GroupContext& ctx, const PublicParameters& pp, PermissionToken& token, std::uint64_t now,
                     Rng& rng) {
  if (now >= token.deadline + kReportGraceSeconds) {
    throw Error(ErrorCode::kTokenExpired, "reporting window closed");
  }
  Report report;
  report.day = now / kSecondsPerDay;
  while (auto k = next_unused_index(token)) {
    auto session = TicketSession::precompute(ctx, pp, token, *k, rng);
    report.tickets.push_back(session.respond(token, report_challenge(session.serial(), report.day), TicketForm::kFull));
  }
  return report;
}

Verdict report_verify(const GroupContext& ctx, const PublicParameters& pp, const Report& report,
                      const VerifyMode& mode) {
  for (std::size_t i = 0; i < report.tickets.size(); ++i) {
    const auto& t = report.tickets[i];
    auto v = ticket_verify(ctx, pp, t, report_challenge(t.Bk, report.day), mode);
    if (!v) return reject("report ticket " + std::to_string(i) + ": " + v.failed_check);
  }
  return {true, {}};
}

}  // namespace mtkt
