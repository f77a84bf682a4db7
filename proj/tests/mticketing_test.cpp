#include <gtest/gtest.h>

#include <set>

#include "mtkt/error.hpp"
#include "mtkt/mticketing.hpp"
#include "test_util.hpp"

using namespace mtkt;
using mtkt::testing::sc;

namespace {

constexpr std::uint64_t kNow = 1'700'000'000;
constexpr std::uint64_t kDeadline = kNow + 30 * kSecondsPerDay;

GroupContext& ctx() {
  static GroupContext c = default_context();
  return c;
}

const SetupResult& world() {
  static const SetupResult w = [] {
    Rng rng(100);
    return setup(ctx(), 10, kDeadline, 2, 3, rng);
  }();
  return w;
}

const PublicParameters& pp() { return world().pp; }

VerifyMode secret_mode() { return VerifierSecretKeys{world().ta.token.gamma, world().ta.set.y}; }

struct Holder {
  UserKeys user;
  PermissionToken token;
};

Holder enrol(std::vector<RegistrationRecord>& db, const std::string& id, Rng& rng) {
  Holder h{UserKeys::generate(ctx(), id, rng), {}};
  register_user(ctx(), h.user, db, rng);
  h.token = token_request(ctx(), pp(), h.user, world().ta, db, rng);
  return h;
}

MTicket spend(PermissionToken& token, Rng& rng, const Scalar& ch, TicketForm form = TicketForm::kFull) {
  auto k = next_unused_index(token);
  EXPECT_TRUE(k.has_value());
  auto session = TicketSession::precompute(ctx(), pp(), token, *k, rng);
  return ticket_issue(session, token, ch, kNow, form);
}

bool both_reject(const MTicket& t, const Scalar& ch) {
  bool a = ticket_verify(ctx(), pp(), t, ch, secret_mode()).ok;
  bool b = ticket_verify(ctx(), pp(), t, ch, VerifierPublic{}).ok;
  EXPECT_EQ(a, b);
  return !a && !b;
}

}  // namespace

TEST(Setup, SignedSetAndParameters) {
  EXPECT_EQ(pp().sigma.signatures.size(), 10u);
  EXPECT_TRUE(pp().consistent());
  EXPECT_TRUE(pp().verify_set(ctx()));
  EXPECT_EQ(pp().W, ctx().gens().g2.pow(world().ta.token.gamma));
  EXPECT_EQ(pp().Y, ctx().gens().g3.pow(world().ta.set.y));
  EXPECT_EQ(pp().hT, ctx().gens().gT.pow(world().xT));
  EXPECT_GE(pp().paillier.bits(), kMinPaillierBits);
  EXPECT_EQ(world().shares.size(), 3u);

  auto back = PublicParameters::deserialize(pp().serialize());
  EXPECT_EQ(back.serialize(), pp().serialize());
  for (const auto& s : world().shares) {
    auto r = RevocationShare::deserialize(s.serialize());
    EXPECT_EQ(r.elgamal, s.elgamal);
    EXPECT_EQ(r.paillier.value, s.paillier.value);
  }
}

TEST(Setup, MinimalSystem) {
  Rng rng(101);
  auto w = setup(ctx(), 1, kDeadline, 1, 1, rng);
  EXPECT_EQ(w.pp.sigma.signatures.size(), 1u);
  EXPECT_THROW(setup(ctx(), 0, kDeadline, 1, 1, rng), Error);
  EXPECT_THROW(setup(ctx(), 5, kDeadline, 3, 2, rng), Error);
}

TEST(Registration, HonestDuplicateAndForged) {
  Rng rng(102);
  std::vector<RegistrationRecord> db;
  auto alice = UserKeys::generate(ctx(), "alice", rng);
  register_user(ctx(), alice, db, rng);
  ASSERT_EQ(db.size(), 1u);
  EXPECT_EQ(db[0].id, "alice");
  EXPECT_EQ(db[0].hU, alice.hU);
  EXPECT_FALSE(db[0].token.has_value());

  try {
    register_user(ctx(), alice, db, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateUser);
  }

  // claims bob's public key without knowing x
  auto bob = UserKeys::generate(ctx(), "bob", rng);
  auto mallory = UserKeys::generate(ctx(), "mallory", rng);
  auto ch = registration_challenge(rng);
  auto resp = registration_respond(ctx(), mallory, ch, rng);
  try {
    registration_accept(ctx(), db, {"bob", bob.hU}, ch, resp);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadSignature);
  }
  EXPECT_EQ(db.size(), 1u);

  // replaying a signature on another challenge fails too
  auto ch2 = registration_challenge(rng);
  auto resp_bob = registration_respond(ctx(), bob, ch, rng);
  EXPECT_THROW(registration_accept(ctx(), db, {"bob", bob.hU}, ch2, resp_bob), Error);
  EXPECT_EQ(db.size(), 1u);

  auto back = RegistrationRecord::deserialize(db[0].serialize());
  EXPECT_EQ(back.id, "alice");
  EXPECT_EQ(back.hU, alice.hU);
}

TEST(TokenRequest, HonestFlow) {
  Rng rng(103);
  std::vector<RegistrationRecord> db;
  auto h = enrol(db, "alice", rng);
  const auto& g = ctx().gens();
  // A^(gamma + r) = g1^s h
  EXPECT_EQ(h.token.A.pow(world().ta.token.gamma + h.token.r), g.g1.pow(h.token.s) * g.h);
  EXPECT_TRUE(extended_bb_verify_pairing(ctx(), pp().W, g.g1.pow(h.token.s), h.token.A, h.token.r));
  EXPECT_EQ(h.token.max_ticket, 10u);
  EXPECT_EQ(h.token.deadline, kDeadline);

  ASSERT_TRUE(db[0].token.has_value());
  const auto& view = *db[0].token;
  EXPECT_EQ(view.A, h.token.A);
  EXPECT_EQ(view.c, g.g1.pow(h.token.s));
  // the revocation precondition, checked with the dealer's direct key
  mpz_class s1 = paillier_decrypt(pp().paillier, world().paillier.sk, view.C0);
  EXPECT_EQ(scalar_from_mpz(s1) + view.s2, h.token.s);
  // and through the threshold path
  EXPECT_EQ(revocation_decrypt_s1(pp(), std::span(world().shares).first(2), view) + view.s2, h.token.s);
  EXPECT_TRUE(schnorr_verify(ctx(), h.user.hU,
                             token_confirmation_message(view.A, g.g1.pow(scalar_from_mpz(s1)), g.g1.pow(view.s2)),
                             view.mu));

  auto tb = PermissionToken::deserialize(h.token.serialize());
  EXPECT_EQ(tb.serialize(), h.token.serialize());
}

TEST(TokenRequest, UnknownAndRepeatedUsers) {
  Rng rng(104);
  std::vector<RegistrationRecord> db;
  auto stranger = UserKeys::generate(ctx(), "stranger", rng);
  try {
    token_request(ctx(), pp(), stranger, world().ta, db, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownUser);
  }
  auto h = enrol(db, "alice", rng);
  EXPECT_THROW(token_request(ctx(), pp(), h.user, world().ta, db, rng), Error);
}

TEST(TokenRequest, TamperedPi1AbortsBeforeIssuing) {
  Rng rng(105);
  std::vector<RegistrationRecord> db;
  auto user = UserKeys::generate(ctx(), "alice", rng);
  register_user(ctx(), user, db, rng);
  TokenRequester u(ctx(), pp(), user);
  TokenIssuer ta(ctx(), pp(), world().ta, db);
  auto msg = u.start(rng);
  msg.pi1.z_m += 1;
  Rng probe = rng;
  try {
    ta.on_request(msg, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadProof);
    EXPECT_NE(std::string(e.what()).find("token request"), std::string::npos);
  }
  // no randomness was drawn for s2 and nothing was stored
  EXPECT_EQ(probe.u64(), rng.u64());
  EXPECT_FALSE(db[0].token.has_value());
  EXPECT_THROW(ta.on_confirm({}), Error);

  // Com on one value, C0 on another
  auto honest = u.start(rng);
  honest.com = honest.com * ctx().gens().g1;
  EXPECT_THROW(ta.on_request(honest, rng), Error);
}

TEST(TokenRequest, UserRejectsBadIssuerProof) {
  Rng rng(106);
  std::vector<RegistrationRecord> db;
  auto user = UserKeys::generate(ctx(), "alice", rng);
  register_user(ctx(), user, db, rng);
  TokenRequester u(ctx(), pp(), user);
  TokenIssuer ta(ctx(), pp(), world().ta, db);
  auto issue = ta.on_request(u.start(rng), rng);
  auto bad = issue;
  bad.A = bad.A * ctx().gens().g;
  EXPECT_THROW(u.on_issue(bad, rng), Error);
  bad = issue;
  bad.r = bad.r + sc(1);
  EXPECT_THROW(u.on_issue(bad, rng), Error);
  auto back = TokenIssueMsg::deserialize(issue.serialize());
  auto confirm = u.on_issue(back, rng);

  // a mu signed by someone else is refused and leaves no record
  auto other = UserKeys::generate(ctx(), "mallory", rng);
  TokenConfirmMsg forged{schnorr_sign(ctx(), other.x, other.hU, to_bytes("x"), rng)};
  try {
    ta.on_confirm(forged);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadSignature);
  }
  EXPECT_FALSE(db[0].token.has_value());

  auto release = ta.on_confirm(TokenConfirmMsg::deserialize(confirm.serialize()));
  auto wrong = release;
  wrong.s2 = wrong.s2 + sc(1);
  EXPECT_THROW(u.on_release(wrong), Error);
  auto token = u.on_release(TokenReleaseMsg::deserialize(release.serialize()));
  EXPECT_EQ(db[0].token->c, ctx().gens().g1.pow(token.s));
}

TEST(TokenRequest, MessagesRoundTrip) {
  Rng rng(107);
  std::vector<RegistrationRecord> db;
  auto user = UserKeys::generate(ctx(), "alice", rng);
  register_user(ctx(), user, db, rng);
  TokenRequester u(ctx(), pp(), user);
  auto msg = u.start(rng);
  auto back = TokenRequestMsg::deserialize(msg.serialize());
  EXPECT_EQ(back.serialize(), msg.serialize());
  EXPECT_TRUE(pi1_verify(ctx(), pp().paillier, back.com, back.C0, back.pi1));
  EXPECT_EQ(UserKeys::deserialize(user.serialize()).serialize(), user.serialize());
}

TEST(Ticket, SessionLayoutAndIdentities) {
  Rng rng(108);
  std::vector<RegistrationRecord> db;
  auto h = enrol(db, "alice", rng);
  ctx().reset_pairing_count();
  auto session = TicketSession::precompute(ctx(), pp(), h.token, 3, rng);
  EXPECT_EQ(ctx().pairing_count(), 0u);
  Bytes blob = session.serialize();
  EXPECT_EQ(blob.size(), 1130u);
  EXPECT_EQ(kSessionBytes, 24u * 32 + 10 * 33 + 32);
  auto back = TicketSession::deserialize(blob);
  EXPECT_EQ(back.serialize(), blob);
  EXPECT_EQ(back.index(), 3u);

  // K = gt Bk^-1 = Bk^delta with delta = s + k
  const G1& Bk = session.serial();
  EXPECT_EQ(Bk, serial_number(ctx(), h.token.s, 3));
  EXPECT_EQ(ctx().gens().gt / Bk, Bk.pow(h.token.s + sc(3)));
  auto w = detail::session_witness(session, h.token);
  EXPECT_EQ(w[0], sc(3));
  EXPECT_EQ(w[4], h.token.s);
  EXPECT_EQ(w[11], h.token.s + sc(3));
  EXPECT_EQ(w[10], w[9] + w[7] * w[5]);  // r5 = r3 + alpha r2
  EXPECT_EQ(w[6], w[7] * h.token.s);     // beta = alpha s

  EXPECT_THROW(TicketSession::deserialize(ByteView(blob).first(1129)), Error);
}

TEST(Ticket, IndexChecks) {
  Rng rng(109);
  std::vector<RegistrationRecord> db;
  auto h = enrol(db, "alice", rng);
  auto expect_code = [&](std::uint32_t k, ErrorCode code) {
    try {
      TicketSession::precompute(ctx(), pp(), h.token, k, rng);
      ADD_FAILURE() << "index " << k << " accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code);
    }
  };
  expect_code(0, ErrorCode::kIndexOutOfRange);
  expect_code(11, ErrorCode::kIndexOutOfRange);
  spend(h.token, rng, sc(1));
  expect_code(1, ErrorCode::kIndexAlreadyUsed);
  EXPECT_EQ(next_unused_index(h.token), 2u);
  EXPECT_EQ(next_unused_index(h.token, {2, 3}), 4u);
}

TEST(Ticket, HonestTicketVerifiesInBothModes) {
  Rng rng(110);
  std::vector<RegistrationRecord> db;
  auto h = enrol(db, "alice", rng);
  Scalar ch = random_nonzero_scalar(rng);
  auto t = spend(h.token, rng, ch);

  ctx().reset_pairing_count();
  auto v1 = ticket_verify(ctx(), pp(), t, ch, secret_mode());
  EXPECT_TRUE(v1.ok) << v1.failed_check;
  EXPECT_EQ(ctx().pairing_count(), 0u);
  auto v2 = ticket_verify(ctx(), pp(), t, ch, VerifierPublic{});
  EXPECT_TRUE(v2.ok) << v2.failed_check;
  EXPECT_EQ(ctx().pairing_count(), 4u);

  Bytes wire = t.serialize();
  EXPECT_EQ(wire.size(), 778u);
  auto back = MTicket::deserialize(wire);
  EXPECT_EQ(back, t);
  EXPECT_TRUE(ticket_verify(ctx(), pp(), back, ch, VerifierPublic{}).ok);

  EXPECT_FALSE(ticket_verify(ctx(), pp(), t, ch + sc(1), secret_mode()).ok);
  EXPECT_EQ(ticket_verify(ctx(), pp(), t, ch + sc(1), secret_mode()).failed_check, "challenge");
}

TEST(Ticket, CompactFormForKeyHolders) {
  Rng rng(111);
  std::vector<RegistrationRecord> db;
  auto h = enrol(db, "alice", rng);
  Scalar ch = random_nonzero_scalar(rng);
  auto t = spend(h.token, rng, ch, TicketForm::kCompact);
  EXPECT_FALSE(t.pi.C.has_value());
  EXPECT_FALSE(t.pi.D.has_value());
  Bytes wire = t.serialize();
  EXPECT_EQ(wire.size(), 712u);
  auto back = MTicket::deserialize(wire);
  EXPECT_TRUE(ticket_verify(ctx(), pp(), back, ch, secret_mode()).ok);
  auto v = ticket_verify(ctx(), pp(), back, ch, VerifierPublic{});
  EXPECT_FALSE(v.ok);
  EXPECT_EQ(v.failed_check, "C and D present");
}

TEST(Ticket, IssueDoesNoGroupOperations) {
  Rng rng(112);
  std::vector<RegistrationRecord> db;
  auto h = enrol(db, "alice", rng);
  auto session = TicketSession::precompute(ctx(), pp(), h.token, 1, rng);
  std::uint64_t before = group_op_count();
  ctx().reset_pairing_count();
  auto t = ticket_issue(session, h.token, sc(42), kNow);
  EXPECT_EQ(group_op_count(), before);
  EXPECT_EQ(ctx().pairing_count(), 0u);
  EXPECT_TRUE(h.token.used.count(1));
  EXPECT_TRUE(session.consumed());
  try {
    ticket_issue(session, h.token, sc(43), kNow);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSessionConsumed);
  }
  EXPECT_TRUE(ticket_verify(ctx(), pp(), t, sc(42), secret_mode()).ok);
}

TEST(Ticket, QuotaAndExpiry) {
  Rng rng(113);
  Rng srng(114);
  auto small = setup(ctx(), 3, kDeadline, 1, 1, srng);
  std::vector<RegistrationRecord> db;
  auto user = UserKeys::generate(ctx(), "alice", rng);
  register_user(ctx(), user, db, rng);
  auto token = token_request(ctx(), small.pp, user, small.ta, db, rng);

  auto expired = TicketSession::precompute(ctx(), small.pp, token, 1, rng);
  try {
    ticket_issue(expired, token, sc(1), kDeadline);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTokenExpired);
  }
  EXPECT_FALSE(expired.consumed());

  for (std::uint32_t k = 1; k <= 3; ++k) {
    auto s = TicketSession::precompute(ctx(), small.pp, token, k, rng);
    ticket_issue(s, token, sc(k), kNow);
  }
  // a session precomputed before the quota ran out cannot be spent after
  PermissionToken stale = token;
  stale.used.erase(3);
  auto s = TicketSession::precompute(ctx(), small.pp, stale, 3, rng);
  try {
    ticket_issue(s, token, sc(9), kNow);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kQuotaExhausted);
  }
  EXPECT_EQ(token.used.size(), 3u);
  EXPECT_FALSE(next_unused_index(token).has_value());
}

TEST(Ticket, MutationsRejectedByBothModes) {
  Rng rng(115);
  std::vector<RegistrationRecord> db;
  auto h = enrol(db, "alice", rng);
  auto other = enrol(db, "bob", rng);
  Scalar ch = random_nonzero_scalar(rng);
  auto t = spend(h.token, rng, ch);
  auto u = spend(other.token, rng, ch);
  const G1& g = ctx().gens().g;

  std::vector<std::function<void(MTicket&)>> edits = {
      [&](MTicket& m) { m.Bk = m.Bk * g; },
      [&](MTicket& m) { m.E.C1 = m.E.C1 * g; },
      [&](MTicket& m) { m.E.C2 = m.E.C2 * g; },
      [&](MTicket& m) { m.pi.C = *m.pi.C * g; },
      [&](MTicket& m) { m.pi.B0 = m.pi.B0 * g; },
      [&](MTicket& m) { m.pi.T1 = m.pi.T1 * g; },
      [&](MTicket& m) { m.pi.T2 = m.pi.T2 * g; },
      [&](MTicket& m) { m.pi.com = m.pi.com * g; },
      [&](MTicket& m) { m.pi.B = m.pi.B * g; },
      [&](MTicket& m) { m.pi.D = *m.pi.D * g; },
      [&](MTicket& m) { m.pi.c = m.pi.c + sc(1); },
      [&](MTicket& m) { m.pi.B = G1::identity(); },
      [&](MTicket& m) { m.pi.B0 = G1::identity(); },
      [&](MTicket& m) { m.Bk = u.Bk; },
      [&](MTicket& m) { m.E = u.E; },
      [&](MTicket& m) { m.pi.B = u.pi.B; m.pi.D = u.pi.D; },
      [&](MTicket& m) { m.pi.B0 = u.pi.B0; m.pi.C = u.pi.C; },
  };
  for (std::size_t i = 0; i < kTicketWitnesses; ++i) {
    edits.push_back([i](MTicket& m) { m.pi.responses[i] = m.pi.responses[i] + Scalar::one(); });
    edits.push_back([i, &u](MTicket& m) { m.pi.responses[i] = u.pi.responses[i]; });
  }
  for (std::size_t i = 0; i < edits.size(); ++i) {
    MTicket m = t;
    edits[i](m);
    EXPECT_TRUE(both_reject(m, ch)) << "edit " << i;
  }

  // single bit flips on the wire; undecodable encodings count as rejected
  Bytes wire = t.serialize();
  for (int trial = 0; trial < 40; ++trial) {
    Bytes b = wire;
    std::size_t bit = rng.u64() % (b.size() * 8);
    b[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    try {
      EXPECT_TRUE(both_reject(MTicket::deserialize(b), ch)) << "bit " << bit;
    } catch (const Error&) {
    }
  }
}

TEST(Ticket, ExtractionRecoversWitness) {
  Rng rng(116);
  std::vector<RegistrationRecord> db;
  auto h = enrol(db, "alice", rng);
  auto session = TicketSession::precompute(ctx(), pp(), h.token, 4, rng);
  auto twin = detail::fork_session(session);
  PermissionToken token_copy = h.token;
  Scalar ch1 = sc(1001), ch2 = sc(2002);
  auto a = ticket_issue(session, h.token, ch1, kNow);
  auto b = ticket_issue(twin, token_copy, ch2, kNow);
  ASSERT_NE(a.pi.c, b.pi.c);
  auto ba = ticket_bundle(ctx(), pp(), a);
  auto bb = ticket_bundle(ctx(), pp(), b);
  EXPECT_EQ(ba.commitments, bb.commitments);  // same masks
  auto w = rep_extract(ba, bb);
  auto planted = detail::session_witness(twin, h.token);
  ASSERT_EQ(w.size(), planted.size());
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(w[i], planted[i]) << "witness " << i;
  // k = (s1 - s1') / (c - c') is the index itself
  EXPECT_EQ(w[0], sc(4));
  auto stmt = ticket_statement(ctx(), pp(), a.Bk, a.E, *a.pi.C, a.pi.B0, a.pi.T1, a.pi.T2, a.pi.com, a.pi.B, *a.pi.D);
  EXPECT_TRUE(stmt.holds(w));
}

TEST(ValidatorAuth, ChecksSignatureDeadlineAndQuota) {
  Rng rng(117);
  std::vector<RegistrationRecord> db;
  auto h = enrol(db, "alice", rng);
  Rng krng(1984);
  static const RsaKeyPair key = RsaKeyPair::generate(krng);
  auto ch = validator_auth_challenge(h.token, rng);
  EXPECT_EQ(ch.rc.size(), 32u);
  auto resp = validator_auth_respond(key, ch, kNow, true);
  EXPECT_NO_THROW(validator_auth_check(key.pub, ch, resp, h.token));
  auto back = AuthResponse::deserialize(resp.serialize());
  EXPECT_NO_THROW(validator_auth_check(key.pub, AuthChallenge::deserialize(ch.serialize()), back, h.token));
  EXPECT_TRUE(back.keys_held);

  auto code_of = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInternal;
  };
  auto late = validator_auth_respond(key, ch, kDeadline, false);
  EXPECT_EQ(code_of([&] { validator_auth_check(key.pub, ch, late, h.token); }), ErrorCode::kTokenExpired);
  auto tampered = resp;
  tampered.ts += 1;
  EXPECT_EQ(code_of([&] { validator_auth_check(key.pub, ch, tampered, h.token); }),
            ErrorCode::kBadValidatorSignature);
  auto other_nonce = validator_auth_challenge(h.token, rng);
  EXPECT_EQ(code_of([&] { validator_auth_check(key.pub, other_nonce, resp, h.token); }),
            ErrorCode::kBadValidatorSignature);
  Rng srng(5);
  auto short_key = RsaKeyPair::generate(srng, 1024);
  auto short_resp = validator_auth_respond(short_key, ch, kNow, false);
  EXPECT_EQ(code_of([&] { validator_auth_check(short_key.pub, ch, short_resp, h.token); }),
            ErrorCode::kBadValidatorSignature);

  PermissionToken full = h.token;
  for (std::uint32_t k = 1; k <= full.max_ticket; ++k) full.used.insert(k);
  EXPECT_EQ(code_of([&] { validator_auth_challenge(full, rng); }), ErrorCode::kQuotaExhausted);
  EXPECT_EQ(code_of([&] { validator_auth_check(key.pub, ch, resp, full); }), ErrorCode::kQuotaExhausted);
}

TEST(Revocation, IdentUserAndIdentTicket) {
  Rng rng(118);
  std::vector<RegistrationRecord> db;
  auto alice = enrol(db, "alice", rng);
  auto bob = enrol(db, "bob", rng);
  std::vector<G1> alice_serials;
  for (int i = 0; i < 3; ++i) {
    auto t = spend(alice.token, rng, sc(i + 1));
    alice_serials.push_back(t.Bk);
    auto quorum = std::span(world().shares).subspan(1, 2);
    EXPECT_EQ(ident_user(pp(), quorum, db, t), "alice");
    EXPECT_EQ(revocation_decrypt_ticket(quorum, t), elgamal_decrypt(world().xT, t.E));
  }
  auto tb = spend(bob.token, rng, sc(9));
  EXPECT_EQ(ident_user(pp(), world().shares, db, tb), "bob");

  try {
    ident_user(pp(), std::span(world().shares).first(1), db, tb);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientShares);
  }

  auto serials = ident_ticket(ctx(), pp(), std::span(world().shares).first(2), *find_user(db, "alice"));
  ASSERT_EQ(serials.size(), 10u);
  for (std::uint32_t k = 1; k <= 10; ++k) EXPECT_EQ(serials[k - 1], serial_number(ctx(), alice.token.s, k));
  for (const auto& s : alice_serials) EXPECT_NE(std::find(serials.begin(), serials.end(), s), serials.end());
  std::set<Bytes> distinct;
  for (const auto& s : serials) {
    auto e = s.encode();
    distinct.insert(Bytes(e.begin(), e.end()));
  }
  EXPECT_EQ(distinct.size(), 10u);
}

TEST(Revocation, UnregisteredSecretIsNotIdentified) {
  Rng rng(119);
  std::vector<RegistrationRecord> db;
  enrol(db, "alice", rng);
  // a token issued outside the registration database
  Scalar s = random_nonzero_scalar(rng);
  auto issue = extended_bb_issue(ctx(), world().ta.token, ctx().gens().g1.pow(s), rng);
  PermissionToken rogue{issue.A, issue.r, s, 10, kDeadline, {}};
  auto t = spend(rogue, rng, sc(5));
  EXPECT_TRUE(ticket_verify(ctx(), pp(), t, sc(5), secret_mode()).ok);
  EXPECT_FALSE(ident_user(pp(), world().shares, db, t).has_value());
}

TEST(Revocation, IdentDuplicateCounts) {
  Rng rng(120);
  std::vector<RegistrationRecord> db;
  auto h = enrol(db, "alice", rng);
  auto t = spend(h.token, rng, sc(1));
  std::vector<UsedTicketRecord> used;
  EXPECT_EQ(ident_duplicate(t.Bk, used), 0u);
  used.push_back({t, sc(1), "V1", kNow});
  used.push_back({t, sc(1), "V2", kNow + 60});
  EXPECT_EQ(ident_duplicate(t.Bk, used), 2u);

  // three plants among ten thousand records, oracle is a plain scan
  std::vector<UsedTicketRecord> big;
  MTicket filler = t;
  G1 p = ctx().gens().g;
  for (int i = 0; i < 10000; ++i) {
    p = p * ctx().gens().g0;
    filler.Bk = p;
    big.push_back({filler, sc(0), "V", kNow});
  }
  for (std::size_t at : {17u, 5003u, 9999u}) big[at].ticket.Bk = t.Bk;
  std::size_t oracle = 0;
  for (const auto& r : big) oracle += r.ticket.Bk.encode() == t.Bk.encode();
  EXPECT_EQ(oracle, 3u);
  EXPECT_EQ(ident_duplicate(t.Bk, big), 3u);

  auto rec = UsedTicketRecord::deserialize(used[1].serialize());
  EXPECT_EQ(rec.ticket, t);
  EXPECT_EQ(rec.validator_id, "V2");
  EXPECT_EQ(rec.dt, kNow + 60);
}

TEST(Report, UnusedTicketsAreReported) {
  Rng rng(121);
  Rng srng(122);
  auto five = setup(ctx(), 5, kDeadline, 1, 1, srng);
  std::vector<RegistrationRecord> db;
  auto user = UserKeys::generate(ctx(), "alice", rng);
  register_user(ctx(), user, db, rng);
  auto token = token_request(ctx(), five.pp, user, five.ta, db, rng);
  std::vector<G1> validated;
  for (std::uint32_t k = 1; k <= 4; ++k) {
    auto s = TicketSession::precompute(ctx(), five.pp, token, k, rng);
    validated.push_back(ticket_issue(s, token, sc(k), kNow).Bk);
  }
  auto report = report_unused(ctx(), five.pp, token, kNow, rng);
  ASSERT_EQ(report.tickets.size(), 1u);
  EXPECT_EQ(report.tickets[0].Bk, serial_number(ctx(), token.s, 5));
  EXPECT_EQ(report.day, kNow / kSecondsPerDay);
  EXPECT_EQ(token.used.size(), 5u);
  VerifyMode keys = VerifierSecretKeys{five.ta.token.gamma, five.ta.set.y};
  EXPECT_TRUE(report_verify(ctx(), five.pp, report, keys).ok);
  EXPECT_TRUE(report_verify(ctx(), five.pp, Report::deserialize(report.serialize()), keys).ok);
  EXPECT_TRUE(report_verify(ctx(), five.pp, report, VerifierPublic{}).ok);
  // a report for another day does not verify
  Report shifted = report;
  shifted.day += 1;
  EXPECT_FALSE(report_verify(ctx(), five.pp, shifted, keys).ok);

  // union of validated and reported is exactly what revocation recovers
  std::set<Bytes> seen, revoked;
  for (const auto& b : validated) seen.insert(Bytes(b.encode().begin(), b.encode().end()));
  for (const auto& t : report.tickets) seen.insert(Bytes(t.Bk.encode().begin(), t.Bk.encode().end()));
  for (const auto& b : ident_ticket(ctx(), five.pp, five.shares, db[0])) {
    revoked.insert(Bytes(b.encode().begin(), b.encode().end()));
  }
  EXPECT_EQ(seen, revoked);
  EXPECT_EQ(report_unused(ctx(), five.pp, token, kNow, rng).tickets.size(), 0u);
}

TEST(Report, FreshTokenAndClosedWindow) {
  Rng rng(123);
  std::vector<RegistrationRecord> db;
  auto h = enrol(db, "alice", rng);
  PermissionToken late = h.token;
  try {
    report_unused(ctx(), pp(), late, kDeadline + kReportGraceSeconds, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTokenExpired);
  }
  // after the deadline but inside the grace period is fine
  auto report = report_unused(ctx(), pp(), h.token, kDeadline + 1, rng);
  EXPECT_EQ(report.tickets.size(), 10u);
  EXPECT_TRUE(report_verify(ctx(), pp(), report, secret_mode()).ok);
}

TEST(Unlinkability, TransmittedFieldsAreFresh) {
  Rng rng(124);
  std::vector<RegistrationRecord> db;
  auto a = enrol(db, "alice", rng);
  auto b = enrol(db, "bob", rng);
  auto ta = spend(a.token, rng, sc(7));
  auto ta2 = spend(a.token, rng, sc(7));
  auto tb = spend(b.token, rng, sc(7));
  auto points = [](const MTicket& t) {
    return std::vector<G1>{t.Bk, t.E.C1, t.E.C2, *t.pi.C, t.pi.B0, t.pi.T1, t.pi.T2, t.pi.com, t.pi.B, *t.pi.D};
  };
  auto pa = points(ta), pb = points(tb);
  for (const auto& x : pa)
    for (const auto& y : pb) EXPECT_NE(x, y);
  EXPECT_NE(ta.E.C1, ta2.E.C1);
  EXPECT_NE(ta.Bk, ta2.Bk);
}
