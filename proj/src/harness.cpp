#include "mtkt/harness.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mtkt/bigint.hpp"

namespace mtkt {

namespace {

constexpr std::string_view kTA = "TA";

std::string ra_name(std::uint32_t index) { return "RA" + std::to_string(index); }

void write_scalar(ByteWriter& w, const Scalar& s) { w.raw(encode_scalar(s)); }
Scalar read_scalar(ByteReader& r) { return decode_scalar(r.raw(kScalarBytes)); }

Bytes encode_partial(const ElGamalPartial& p) {
  ByteWriter w;
  w.u32(p.index);
  w.u32(p.t);
  w.raw(p.value.encode());
  return std::move(w).take();
}

ElGamalPartial decode_partial(ByteView b) {
  ByteReader r(b);
  ElGamalPartial p;
  p.index = r.u32();
  p.t = r.u32();
  p.value = G1::decode(r.raw(kG1Bytes));
  r.expect_done();
  return p;
}

Bytes encode_partial(const PaillierPartial& p) {
  ByteWriter w;
  w.u32(p.index);
  w.u32(p.t);
  w.u32(p.n);
  write_mpz(w, p.value);
  return std::move(w).take();
}

PaillierPartial decode_paillier_partial(ByteView b) {
  ByteReader r(b);
  PaillierPartial p;
  p.index = r.u32();
  p.t = r.u32();
  p.n = r.u32();
  p.value = read_mpz(r);
  r.expect_done();
  return p;
}

Bytes encode_verdict(bool ok, std::uint64_t dt, std::size_t duplicates) {
  ByteWriter w;
  w.u8(ok ? 1 : 0);
  w.u64(dt);
  w.u32(static_cast<std::uint32_t>(duplicates));
  return std::move(w).take();
}

Bytes encode_receipt(bool ok, std::uint64_t dt) {
  ByteWriter w;
  w.u8(ok ? 1 : 0);
  w.u64(dt);
  return std::move(w).take();
}

Bytes read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

void write_bytes(const std::filesystem::path& path, ByteView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
}

Bytes encode_ta_keys(const TAKeys& k) {
  ByteWriter w;
  write_scalar(w, k.token.gamma);
  write_scalar(w, k.set.y);
  return std::move(w).take();
}

TAKeys decode_ta_keys(const GroupContext& ctx, ByteView b) {
  ByteReader r(b);
  Scalar gamma = read_scalar(r);
  Scalar y = read_scalar(r);
  r.expect_done();
  return {TokenKeyPair::from_secret(ctx, gamma), BBKeyPair::from_secret(ctx, y)};
}

}  // namespace

// ---- Actors ---------------------------------------------------------------------------

void CardActor::prepare(const PublicParameters& pp) {
  if (pending || !token) return;
  if (auto k = next_unused_index(*token)) pending = TicketSession::precompute(ctx, pp, *token, *k, rng);
}

Bytes CardActor::serialize() const {
  ByteWriter w;
  w.blob(user.serialize());
  w.u8(token ? 1 : 0);
  if (token) w.blob(token->serialize());
  w.u8(pending ? 1 : 0);
  if (pending) w.blob(pending->serialize());
  return std::move(w).take();
}

std::unique_ptr<CardActor> CardActor::restore(std::string name, GroupContext ctx, Rng rng, ByteView state) {
  ByteReader r(state);
  UserKeys user = UserKeys::deserialize(r.blob());
  auto card = std::make_unique<CardActor>(CardActor{std::move(name), std::move(ctx), rng, std::move(user), {}, {}});
  if (r.u8()) card->token = PermissionToken::deserialize(r.blob());
  if (r.u8()) card->pending = TicketSession::deserialize(r.blob());
  r.expect_done();
  return card;
}

Bytes ValidatorActor::serialize() const {
  ByteWriter w;
  w.blob(rsa.serialize());
  w.u8(keys ? 1 : 0);
  if (keys) {
    write_scalar(w, keys->gamma);
    write_scalar(w, keys->y);
  }
  return std::move(w).take();
}

std::unique_ptr<ValidatorActor> ValidatorActor::restore(std::string name, GroupContext ctx, Rng rng,
                                                        ByteView state) {
  ByteReader r(state);
  RsaKeyPair rsa = RsaKeyPair::deserialize(r.blob());
  auto v = std::make_unique<ValidatorActor>(ValidatorActor{std::move(name), std::move(ctx), rng, std::move(rsa), {}, {}});
  if (r.u8()) {
    Scalar gamma = read_scalar(r);
    Scalar y = read_scalar(r);
    v->keys = VerifierSecretKeys{gamma, y};
  }
  r.expect_done();
  return v;
}

// ---- World ----------------------------------------------------------------------------

World::World(const SimConfig& cfg) : World(cfg, Rng(cfg.seed), true) {}
World::World(const SimConfig& cfg, Rng rng) : World(cfg, std::move(rng), true) {}

World::World(const SimConfig& cfg, Rng rng, bool run_setup) : base_(default_context()), rng_(rng), now_(cfg.now) {
  if (!run_setup) return;
  Rng setup_rng = rng_.fork("setup");
  auto s = setup(base_, cfg.max_ticket, cfg.deadline, cfg.threshold, cfg.authorities, setup_rng);
  pp_ = std::move(s.pp);
  ta_ = std::make_unique<TransportAuthorityActor>(
      TransportAuthorityActor{base_.fork(), rng_.fork("TA"), std::move(s.ta), {}, {}});
  for (std::uint32_t i = 0; i < s.shares.size(); ++i) {
    authorities_.push_back(
        std::make_unique<RevocationAuthorityActor>(RevocationAuthorityActor{i + 1, base_.fork(), s.shares[i]}));
  }
}

Bytes World::send(std::string_view from, std::string_view to, std::string_view label, Bytes payload) {
  ByteWriter frame;
  frame.blob(payload);
  Bytes wire = std::move(frame).take();
  transcript_.record(from, to, label, std::move(payload));
  ByteReader r(wire);
  Bytes received = r.blob();
  r.expect_done();
  return received;
}

CardActor& World::add_card(const std::string& name) {
  if (cards_.count(name)) throw Error(ErrorCode::kInvalidArgument, "card " + name + " exists");
  Rng r = rng_.fork("card:" + name);
  UserKeys user = UserKeys::generate(base_, name, r);
  auto card = std::make_unique<CardActor>(CardActor{name, base_.fork(), r, std::move(user), {}, {}});
  return *(cards_[name] = std::move(card));
}

ValidatorActor& World::add_validator(const std::string& name, bool with_keys) {
  if (validators_.count(name)) throw Error(ErrorCode::kInvalidArgument, "validator " + name + " exists");
  Rng r = rng_.fork("validator:" + name);
  RsaKeyPair rsa = RsaKeyPair::generate(r);
  auto v = std::make_unique<ValidatorActor>(ValidatorActor{name, base_.fork(), r, std::move(rsa), {}, {}});
  if (with_keys) v->keys = VerifierSecretKeys{ta_->keys.token.gamma, ta_->keys.set.y};
  return *(validators_[name] = std::move(v));
}

CardActor& World::card(const std::string& name) {
  auto it = cards_.find(name);
  if (it == cards_.end()) throw Error(ErrorCode::kInvalidArgument, "no card " + name);
  return *it->second;
}

ValidatorActor& World::validator(const std::string& name) {
  auto it = validators_.find(name);
  if (it == validators_.end()) throw Error(ErrorCode::kInvalidArgument, "no validator " + name);
  return *it->second;
}

RevocationAuthorityActor& World::authority(std::uint32_t index) {
  if (index == 0 || index > authorities_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "no revocation authority " + std::to_string(index));
  }
  return *authorities_[index - 1];
}

CardActor& World::clone_card(const std::string& from, const std::string& name) {
  if (cards_.count(name)) throw Error(ErrorCode::kInvalidArgument, "card " + name + " exists");
  Bytes state = card(from).serialize();
  return *(cards_[name] = CardActor::restore(name, base_.fork(), rng_.fork("card:" + name), state));
}

void World::register_card(const std::string& name) {
  auto& c = card(name);
  RegistrationHello hello{c.user.id, c.user.hU};
  auto hello_in = RegistrationHello::deserialize(send(c.name, kTA, "reg_hello", hello.serialize()));
  auto ch = registration_challenge(ta_->rng);
  auto ch_in = RegistrationChallenge::deserialize(send(kTA, c.name, "reg_challenge", ch.serialize()));
  auto resp = registration_respond(c.ctx, c.user, ch_in, c.rng);
  auto resp_in = RegistrationResponse::deserialize(send(c.name, kTA, "reg_response", resp.serialize()));
  registration_accept(ta_->ctx, ta_->ledger.reg, hello_in, ch, resp_in);
}

void World::request_token(const std::string& name) {
  auto& c = card(name);
  TokenRequester user(c.ctx, pp_, c.user);
  TokenIssuer issuer(ta_->ctx, pp_, ta_->keys, ta_->ledger.reg);
  auto req = TokenRequestMsg::deserialize(send(c.name, kTA, "token_request", user.start(c.rng).serialize()));
  auto issue = TokenIssueMsg::deserialize(send(kTA, c.name, "token_issue", issuer.on_request(req, ta_->rng).serialize()));
  auto confirm = TokenConfirmMsg::deserialize(send(c.name, kTA, "token_confirm", user.on_issue(issue, c.rng).serialize()));
  auto release = TokenReleaseMsg::deserialize(send(kTA, c.name, "token_release", issuer.on_confirm(confirm).serialize()));
  c.token = user.on_release(release);
  c.pending.reset();
}

void World::store_used(UsedTicketRecord rec, std::size_t& duplicates) {
  G1 serial = rec.ticket.Bk;
  ta_->ledger.used.push_back(std::move(rec));
  duplicates = mtkt::ident_duplicate(serial, ta_->ledger.used);
  if (duplicates == 2) ta_->flagged.push_back(serial);
}

ValidationOutcome World::validate(const std::string& card_name, const std::string& validator_name) {
  auto& c = card(card_name);
  auto& v = validator(validator_name);
  ValidationOutcome out;
  try {
    if (!c.token) throw Error(ErrorCode::kInvalidArgument, "card " + c.name + " holds no token");
    c.prepare(pp_);
    auto ach = validator_auth_challenge(*c.token, c.rng);
    auto ach_in = AuthChallenge::deserialize(send(c.name, v.name, "auth_challenge", ach.serialize()));
    auto resp = validator_auth_respond(v.rsa, ach_in, now_, v.keys.has_value());
    auto resp_in = AuthResponse::deserialize(send(v.name, c.name, frame_label::kAuthResponse, resp.serialize()));
    validator_auth_check(v.rsa.pub, ach, resp_in, *c.token);

    Scalar ch;
    Bytes ch_bytes;
    do {
      ch = random_nonzero_scalar(v.rng);
      auto e = encode_scalar(ch);
      ch_bytes.assign(e.begin(), e.end());
    } while (!v.nonces.insert(ch_bytes).second);
    Scalar ch_in = decode_scalar(send(v.name, c.name, frame_label::kChallenge, ch_bytes));

    if (!c.pending) throw Error(ErrorCode::kQuotaExhausted, "no unused index");
    auto form = resp_in.keys_held ? TicketForm::kCompact : TicketForm::kFull;
    MTicket ticket = ticket_issue(*c.pending, *c.token, ch_in, resp_in.ts, form);
    c.pending.reset();
    MTicket received = MTicket::deserialize(send(c.name, v.name, frame_label::kTicket, ticket.serialize()));
    out.ticket = received;

    VerifyMode mode = VerifierPublic{};
    if (v.keys) mode = *v.keys;
    Verdict verdict = ticket_verify(v.ctx, pp_, received, ch, mode);
    out.accepted = verdict.ok;
    out.detail = verdict.failed_check;
    if (verdict.ok) store_used({received, ch, v.name, now_}, out.duplicates);
    send(v.name, c.name, frame_label::kVerdict, encode_verdict(verdict.ok, now_, out.duplicates));
  } catch (const Error& e) {
    out.accepted = false;
    out.error = e.code();
    out.detail = e.what();
  }
  return out;
}

ReportOutcome World::report(const std::string& card_name) {
  auto& c = card(card_name);
  if (!c.token) throw Error(ErrorCode::kInvalidArgument, "card " + c.name + " holds no token");
  Report r = report_unused(c.ctx, pp_, *c.token, now_, c.rng);
  c.pending.reset();
  Report in = Report::deserialize(send(c.name, kTA, frame_label::kReport, r.serialize()));
  ReportOutcome out;
  Verdict v = report_verify(ta_->ctx, pp_, in, VerifierSecretKeys{ta_->keys.token.gamma, ta_->keys.set.y});
  out.accepted = v.ok;
  out.detail = v.failed_check;
  if (v.ok) {
    for (const auto& t : in.tickets) {
      std::size_t dup = 0;
      store_used({t, report_challenge(t.Bk, in.day), std::string(kReportValidatorId), now_}, dup);
      if (dup > 1) ++out.duplicates;
      out.serials.push_back(t.Bk);
    }
  }
  send(kTA, c.name, frame_label::kReceipt, encode_receipt(v.ok, now_));
  return out;
}

std::optional<std::string> World::revoke_user(const MTicket& ticket, const std::vector<std::uint32_t>& quorum) {
  std::vector<ElGamalPartial> partials;
  for (auto i : quorum) {
    auto& ra = authority(i);
    auto ct = ElGamalCiphertext::deserialize(send(kTA, ra_name(i), "decrypt_ticket", ticket.E.serialize()));
    auto p = elgamal_partial_decrypt(ra.share.elgamal, ct);
    partials.push_back(decode_partial(send(ra_name(i), kTA, "ticket_partial", encode_partial(p))));
  }
  G1 g1s = elgamal_combine(ticket.E, partials);
  for (const auto& rec : ta_->ledger.reg) {
    if (rec.token && rec.token->c == g1s) return rec.id;
  }
  return std::nullopt;
}

std::vector<G1> World::revoke_tickets(const std::string& user_id, const std::vector<std::uint32_t>& quorum) {
  const RegistrationRecord* rec = find_user(ta_->ledger.reg, user_id);
  if (!rec) throw Error(ErrorCode::kUnknownUser, "no registration for " + user_id);
  if (!rec->token) throw Error(ErrorCode::kInvalidArgument, "user " + user_id + " holds no token");
  std::vector<PaillierPartial> partials;
  for (auto i : quorum) {
    auto& ra = authority(i);
    ByteWriter w;
    write_mpz(w, rec->token->C0.value);
    Bytes in = send(kTA, ra_name(i), "decrypt_s1", std::move(w).take());
    ByteReader r(in);
    PaillierCiphertext c0{read_mpz(r)};
    auto p = paillier_partial_decrypt(pp_.paillier, ra.share.paillier, c0);
    partials.push_back(decode_paillier_partial(send(ra_name(i), kTA, "s1_partial", encode_partial(p))));
  }
  Scalar s = scalar_from_mpz(paillier_combine(pp_.paillier, partials)) + rec->token->s2;
  std::vector<G1> out;
  for (std::uint32_t k = 1; k <= pp_.max_ticket; ++k) out.push_back(serial_number(ta_->ctx, s, k));
  return out;
}

std::size_t World::ident_duplicate(const G1& serial) const { return mtkt::ident_duplicate(serial, ta_->ledger.used); }

// ---- Persistence ------------------------------------------------------------------------

void World::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  write_bytes(dir / "params.bin", pp_.serialize());
  write_bytes(dir / "ta.key", encode_ta_keys(ta_->keys));
  for (const auto& ra : authorities_) {
    write_bytes(dir / ("ra-" + std::to_string(ra->index) + ".key"), ra->share.serialize());
  }
  for (const auto& [name, v] : validators_) write_bytes(dir / ("validator-" + name + ".key"), v->serialize());
  for (const auto& [name, c] : cards_) write_bytes(dir / ("card-" + name + ".state"), c->serialize());
  db_store(dir / "ledger.db", ta_->ledger);
  transcript_.write(dir / "transcript.txt");
}

std::unique_ptr<World> World::load(const std::filesystem::path& dir, std::uint64_t now, Rng rng) {
  if (!std::filesystem::exists(dir / "params.bin")) {
    throw Error(ErrorCode::kInvalidArgument, "no system in " + dir.string() + " (run setup first)");
  }
  SimConfig cfg;
  cfg.now = now;
  std::unique_ptr<World> w(new World(cfg, rng, false));
  if (std::filesystem::exists(dir / "transcript.txt")) {
    Bytes text = read_bytes(dir / "transcript.txt");
    w->transcript_ = Transcript::parse(std::string_view(reinterpret_cast<const char*>(text.data()), text.size()));
  }
  // A fixed seed must not replay the same masks in a later invocation.
  w->rng_ = w->rng_.fork("resume:" + std::to_string(w->transcript_.size()));
  w->pp_ = PublicParameters::deserialize(read_bytes(dir / "params.bin"));
  w->ta_ = std::make_unique<TransportAuthorityActor>(TransportAuthorityActor{
      w->base_.fork(), w->rng_.fork("TA"), decode_ta_keys(w->base_, read_bytes(dir / "ta.key")), {}, {}});
  w->ta_->ledger = db_load(dir / "ledger.db");
  for (const auto& rec : w->ta_->ledger.used) {
    if (mtkt::ident_duplicate(rec.ticket.Bk, w->ta_->ledger.used) >= 2) {
      auto& f = w->ta_->flagged;
      if (std::find(f.begin(), f.end(), rec.ticket.Bk) == f.end()) f.push_back(rec.ticket.Bk);
    }
  }
  for (std::uint32_t i = 1; i <= w->pp_.authorities; ++i) {
    w->authorities_.push_back(std::make_unique<RevocationAuthorityActor>(RevocationAuthorityActor{
        i, w->base_.fork(), RevocationShare::deserialize(read_bytes(dir / ("ra-" + std::to_string(i) + ".key")))}));
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    std::string f = p.filename().string();
    if (f.starts_with("card-") && f.ends_with(".state")) {
      std::string name = f.substr(5, f.size() - 11);
      w->cards_[name] = CardActor::restore(name, w->base_.fork(), w->rng_.fork("card:" + name), read_bytes(p));
    } else if (f.starts_with("validator-") && f.ends_with(".key")) {
      std::string name = f.substr(10, f.size() - 14);
      w->validators_[name] =
          ValidatorActor::restore(name, w->base_.fork(), w->rng_.fork("validator:" + name), read_bytes(p));
    }
  }
  return w;
}

}  // namespace mtkt
