#include <algorithm>
#include <functional>
#include <set>

#include "mtkt/harness.hpp"

namespace mtkt {

namespace {

struct Divergence {
  std::string what;
};

class Checker {
 public:
  explicit Checker(ScenarioResult& r) : r_(r) {}

  void expect(bool cond, const std::string& what) {
    if (!cond) throw Divergence{what};
    r_.notes.push_back("ok: " + what);
  }
  template <class A, class B>
  void expect_eq(const A& observed, const B& expected, const std::string& what) {
    if (!(observed == expected)) {
      throw Divergence{what + " (expected " + std::to_string(expected) + ", got " + std::to_string(observed) + ")"};
    }
    r_.notes.push_back("ok: " + what);
  }
  void expect_code(const std::function<void()>& fn, ErrorCode code, const std::string& what) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.code() != code) throw Divergence{what + " (got " + std::string(e.what()) + ")"};
      r_.notes.push_back("ok: " + what);
      return;
    }
    throw Divergence{what + " (no error)"};
  }

 private:
  ScenarioResult& r_;
};

Bytes key_of(const G1& p) {
  auto e = p.encode();
  return Bytes(e.begin(), e.end());
}

std::size_t validated_count(const World& w) {
  return static_cast<std::size_t>(std::count_if(w.ta().ledger.used.begin(), w.ta().ledger.used.end(),
                                                 [](const auto& r) { return r.validator_id != kReportValidatorId; }));
}

std::vector<std::uint32_t> first_n(std::uint32_t n) {
  std::vector<std::uint32_t> q;
  for (std::uint32_t i = 1; i <= n; ++i) q.push_back(i);
  return q;
}

// All size-t subsets of {1..n}.
std::vector<std::vector<std::uint32_t>> subsets(std::uint32_t n, std::uint32_t t) {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> cur;
  std::function<void(std::uint32_t)> go = [&](std::uint32_t from) {
    if (cur.size() == t) {
      out.push_back(cur);
      return;
    }
    for (std::uint32_t i = from; i <= n; ++i) {
      cur.push_back(i);
      go(i + 1);
      cur.pop_back();
    }
  };
  go(1);
  return out;
}

void enrol(World& w, const std::string& name) {
  w.add_card(name);
  w.register_card(name);
  w.request_token(name);
}

void happy_path(World& w, Checker& c, const SimConfig& cfg) {
  enrol(w, "alice");
  w.add_validator("V1", true);
  w.add_validator("V2", false);
  std::uint32_t validate = std::min<std::uint32_t>(3, cfg.max_ticket);
  std::uint64_t public_verifies = 0;
  for (std::uint32_t i = 0; i < validate; ++i) {
    bool pub = i % 2 == 1;
    auto out = w.validate("alice", pub ? "V2" : "V1");
    c.expect(out.accepted, "validation " + std::to_string(i + 1) + " accepted");
    c.expect_eq(out.ticket->serialize().size(), pub ? kTicketBytes : kCompactTicketBytes, "ticket size");
    public_verifies += pub;
  }
  w.set_now(w.now() + kSecondsPerDay);
  auto rep = w.report("alice");
  c.expect(rep.accepted, "report accepted");
  c.expect_eq(validated_count(w), std::size_t{validate}, "validated records");
  c.expect_eq(rep.serials.size(), std::size_t{cfg.max_ticket - validate}, "reported tickets");
  c.expect_eq(validated_count(w) + rep.serials.size(), std::size_t{cfg.max_ticket}, "validated + reported");
  c.expect_eq(w.card("alice").ctx.pairing_count(), std::uint64_t{0}, "card pairings");
  c.expect_eq(w.validator("V1").ctx.pairing_count(), std::uint64_t{0}, "secret-key validator pairings");
  c.expect_eq(w.validator("V2").ctx.pairing_count(), 4 * public_verifies, "public validator pairings");
  c.expect(same_records(replay_used_tickets(w.transcript()), w.ta().ledger.used), "ledger equals transcript replay");
  c.expect(w.ta().flagged.empty(), "nothing flagged");
}

void double_spend(World& w, Checker& c, const SimConfig&) {
  enrol(w, "alice");
  w.add_validator("V1", true);
  w.add_validator("V2", false);
  w.clone_card("alice", "alice-clone");
  auto first = w.validate("alice", "V1");
  c.expect(first.accepted && first.duplicates == 1, "original spend accepted");
  auto second = w.validate("alice-clone", "V2");
  c.expect(second.accepted, "clone's ticket verifies off-line");
  c.expect(first.ticket->Bk == second.ticket->Bk, "clone reuses the serial number");
  c.expect_eq(w.ident_duplicate(second.ticket->Bk), std::size_t{2}, "ident_duplicate");
  c.expect(w.ta().flagged.size() == 1 && w.ta().flagged[0] == first.ticket->Bk, "TA flags the serial");
  c.expect(w.revoke_user(*second.ticket, first_n(w.pp().threshold)) == "alice", "fraudster identified");
}

void report_then_spend(World& w, Checker& c, const SimConfig& cfg) {
  enrol(w, "alice");
  w.add_validator("V1", true);
  c.expect(w.validate("alice", "V1").accepted, "first validation");
  w.clone_card("alice", "alice-clone");
  auto rep = w.report("alice");
  c.expect(rep.accepted && rep.serials.size() == cfg.max_ticket - 1, "unused tickets reported");
  auto late = w.validate("alice-clone", "V1");
  c.expect(late.accepted, "reported ticket still verifies");
  c.expect_eq(late.duplicates, std::size_t{2}, "duplicate against the report");
  auto recs = w.ta().ledger.used;
  c.expect(std::count_if(recs.begin(), recs.end(),
                         [&](const auto& r) {
                           return r.ticket.Bk == late.ticket->Bk && r.validator_id == kReportValidatorId;
                         }) == 1,
           "one of the two records is the report");
  c.expect(std::find(w.ta().flagged.begin(), w.ta().flagged.end(), late.ticket->Bk) != w.ta().flagged.end(),
           "TA flags the serial");
  c.expect(w.revoke_user(*late.ticket, first_n(w.pp().threshold)) == "alice", "fraudster identified");
}

void expired_token(World& w, Checker& c, const SimConfig& cfg) {
  enrol(w, "alice");
  w.add_validator("V1", true);
  w.set_now(cfg.deadline);
  std::size_t frames = w.transcript().size();
  auto out = w.validate("alice", "V1");
  c.expect(!out.accepted && out.error == ErrorCode::kTokenExpired, "card aborts on validator timestamp");
  bool ticket_sent = false;
  for (std::size_t i = frames; i < w.transcript().size(); ++i) {
    ticket_sent |= w.transcript().frames()[i].label == frame_label::kTicket;
  }
  c.expect(!ticket_sent, "no ticket left the card");
  c.expect(w.ta().ledger.used.empty(), "nothing recorded");
  c.expect(w.card("alice").token->used.empty(), "no index consumed");
  w.set_now(cfg.deadline - 1);
  c.expect(w.validate("alice", "V1").accepted, "accepted one second earlier");
}

void quota_exhausted(World& w, Checker& c, const SimConfig& cfg) {
  enrol(w, "alice");
  w.add_validator("V1", true);
  for (std::uint32_t i = 0; i < cfg.max_ticket; ++i) {
    c.expect(w.validate("alice", "V1").accepted, "validation " + std::to_string(i + 1));
  }
  auto out = w.validate("alice", "V1");
  c.expect(!out.accepted && out.error == ErrorCode::kQuotaExhausted, "card refuses past max_ticket");
  c.expect_eq(w.ta().ledger.used.size(), std::size_t{cfg.max_ticket}, "records");
  auto rep = w.report("alice");
  c.expect(rep.accepted && rep.serials.empty(), "empty report");
}

void revoke_user(World& w, Checker& c, const SimConfig& cfg) {
  std::vector<std::string> users = {"alice", "bob", "carol"};
  w.add_validator("V1", true);
  for (const auto& u : users) enrol(w, u);
  std::uint32_t per_user = std::min<std::uint32_t>(2, cfg.max_ticket);
  for (std::uint32_t i = 0; i < per_user; ++i) {
    for (const auto& u : users) {
      auto out = w.validate(u, "V1");
      c.expect(out.accepted, u + " validates");
    }
  }
  auto quorums = subsets(w.authority_count(), w.pp().threshold);
  std::size_t n = 0;
  for (const auto& rec : w.ta().ledger.used) {
    std::string owner;
    for (const auto& u : users) {
      const auto& tok = *w.card(u).token;
      for (auto k : tok.used) owner = serial_number(w.ta().ctx, tok.s, k) == rec.ticket.Bk ? u : owner;
    }
    auto got = w.revoke_user(rec.ticket, quorums[n++ % quorums.size()]);
    c.expect(got == owner, "ticket traced to " + owner);
  }
}

void revoke_tickets(World& w, Checker& c, const SimConfig& cfg) {
  enrol(w, "alice");
  enrol(w, "bob");
  w.add_validator("V1", true);
  std::uint32_t validate = cfg.max_ticket / 2;
  for (std::uint32_t i = 0; i < validate; ++i) {
    c.expect(w.validate("alice", "V1").accepted, "alice validates");
    c.expect(w.validate("bob", "V1").accepted, "bob validates");
  }
  c.expect(w.report("alice").accepted, "alice reports");
  auto serials = w.revoke_tickets("alice", first_n(w.pp().threshold));
  c.expect_eq(serials.size(), std::size_t{cfg.max_ticket}, "serials recovered");
  std::set<Bytes> recovered, alice_seen;
  for (const auto& s : serials) recovered.insert(key_of(s));
  for (const auto& r : w.ta().ledger.used) {
    if (recovered.count(key_of(r.ticket.Bk))) alice_seen.insert(key_of(r.ticket.Bk));
  }
  c.expect(recovered == alice_seen, "recovered serials equal alice's validated + reported");
  std::size_t bob_hits = 0;
  for (const auto& r : w.ta().ledger.used) {
    if (w.revoke_user(r.ticket, first_n(w.pp().threshold)) == "bob") bob_hits += recovered.count(key_of(r.ticket.Bk));
  }
  c.expect_eq(bob_hits, std::size_t{0}, "no overlap with bob's tickets");
}

void threshold_below_t(World& w, Checker& c, const SimConfig&) {
  enrol(w, "alice");
  w.add_validator("V1", true);
  auto out = w.validate("alice", "V1");
  c.expect(out.accepted, "validation");
  std::uint32_t t = w.pp().threshold, n = w.authority_count();
  if (t > 1) {
    for (const auto& q : subsets(n, t - 1)) {
      c.expect_code([&] { w.revoke_user(*out.ticket, q); }, ErrorCode::kInsufficientShares,
                    "ident_user below threshold");
      c.expect_code([&] { w.revoke_tickets("alice", q); }, ErrorCode::kInsufficientShares,
                    "ident_ticket below threshold");
    }
  }
  G1 expected = serial_number(w.ta().ctx, w.card("alice").token->s, 1);
  for (const auto& q : subsets(n, t)) {
    c.expect(w.revoke_user(*out.ticket, q) == "alice", "ident_user at threshold");
    c.expect(w.revoke_tickets("alice", q).at(0) == expected, "ident_ticket at threshold");
  }
}

using ScenarioFn = void (*)(World&, Checker&, const SimConfig&);

const std::vector<std::pair<std::string, ScenarioFn>>& registry() {
  static const std::vector<std::pair<std::string, ScenarioFn>> r = {
      {"happy_path", happy_path},       {"double_spend", double_spend},
      {"report_then_spend", report_then_spend}, {"expired_token", expired_token},
      {"quota_exhausted", quota_exhausted}, {"revoke_user", revoke_user},
      {"revoke_tickets", revoke_tickets}, {"threshold_below_t", threshold_below_t},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [n, f] : registry()) out.push_back(n);
    return out;
  }();
  return names;
}

ScenarioResult run_scenario(std::string_view name, const SimConfig& cfg) {
  auto it = std::find_if(registry().begin(), registry().end(), [&](const auto& e) { return e.first == name; });
  if (it == registry().end()) throw Error(ErrorCode::kInvalidArgument, "unknown scenario " + std::string(name));
  ScenarioResult result;
  World world(cfg);
  Checker checker(result);
  try {
    it->second(world, checker, cfg);
    result.ok = true;
  } catch (const Divergence& d) {
    result.divergence = d.what;
  } catch (const Error& e) {
    result.divergence = std::string("unexpected error: ") + e.what();
  }
  result.transcript = world.transcript().text();
  return result;
}

}  // namespace mtkt
