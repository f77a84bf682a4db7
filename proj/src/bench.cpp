#include <chrono>
#include <cmath>
#include <cstdio>
#include <type_traits>

#include "json.hpp"

#include "mtkt/harness.hpp"

namespace mtkt {

namespace {

using Clock = std::chrono::steady_clock;

class Samples {
 public:
  template <class F>
  auto time(F&& f) {
    auto t0 = Clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      ms_.push_back(elapsed(t0));
    } else {
      auto r = f();
      ms_.push_back(elapsed(t0));
      return r;
    }
  }
  void add(double ms) { ms_.push_back(ms); }
  const std::vector<double>& values() const { return ms_; }

  PhaseTiming summary(std::string name) const {
    PhaseTiming p{std::move(name), 0, 0, static_cast<std::uint32_t>(ms_.size())};
    if (ms_.empty()) return p;
    for (double v : ms_) p.mean_ms += v;
    p.mean_ms /= static_cast<double>(ms_.size());
    if (ms_.size() > 1) {
      double ss = 0;
      for (double v : ms_) ss += (v - p.mean_ms) * (v - p.mean_ms);
      p.stddev_ms = std::sqrt(ss / static_cast<double>(ms_.size() - 1));
    }
    return p;
  }

 private:
  static double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  }
  std::vector<double> ms_;
};

// Validation timings measured on a SIM card with NFC, for context only.
const nlohmann::ordered_json& sim_card_reference() {
  static const nlohmann::ordered_json j = {
      {"battery_on",
       {{"validator_authentication", 56.98},
        {"card_signature_and_nfc", 123.01},
        {"verification_without_pairing", 4.43},
        {"verification_with_pairing", 12.19},
        {"total_without_pairing", 184.25},
        {"total_with_pairing", 191.80}}},
      {"battery_off",
       {{"validator_authentication", 76.55},
        {"card_signature_and_nfc", 185.28},
        {"total_without_pairing", 266.52},
        {"total_with_pairing", 272.55}}},
  };
  return j;
}

}  // namespace

bool BenchReport::ok() const {
  for (const auto& c : checks) {
    if (!c.ok()) return false;
  }
  return true;
}

std::string BenchReport::to_json() const {
  nlohmann::ordered_json j;
  j["phases"] = nlohmann::ordered_json::array();
  for (const auto& p : phases) {
    j["phases"].push_back({{"name", p.name}, {"mean_ms", p.mean_ms}, {"stddev_ms", p.stddev_ms}, {"trials", p.trials}});
  }
  j["pairings"] = pairings;
  j["group_ops"] = group_ops;
  j["sizes"] = sizes;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name}, {"expected", c.expected}, {"observed", c.observed}, {"ok", c.ok()}});
  }
  j["ok"] = ok();
  j["sim_card_reference_ms"] = sim_card_reference();
  return j.dump(2) + "\n";
}

std::string BenchReport::to_table() const {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-28s %12s %12s %7s\n", "phase", "mean ms", "stddev ms", "trials");
  out += line;
  for (const auto& p : phases) {
    std::snprintf(line, sizeof line, "%-28s %12.3f %12.3f %7u\n", p.name.c_str(), p.mean_ms, p.stddev_ms, p.trials);
    out += line;
  }
  out += "\n";
  for (const auto& [k, v] : sizes) {
    std::snprintf(line, sizeof line, "size %-34s %8llu\n", k.c_str(), static_cast<unsigned long long>(v));
    out += line;
  }
  for (const auto& [k, v] : pairings) {
    std::snprintf(line, sizeof line, "pairings %-30s %8llu\n", k.c_str(), static_cast<unsigned long long>(v));
    out += line;
  }
  for (const auto& [k, v] : group_ops) {
    std::snprintf(line, sizeof line, "group ops %-29s %8llu\n", k.c_str(), static_cast<unsigned long long>(v));
    out += line;
  }
  out += "\n";
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-4s %-40s expected %llu, observed %llu\n", c.ok() ? "ok" : "FAIL",
                  c.name.c_str(), static_cast<unsigned long long>(c.expected),
                  static_cast<unsigned long long>(c.observed));
    out += line;
  }
  return out;
}

BenchReport bench(const BenchConfig& cfg) {
  if (cfg.trials == 0) throw Error(ErrorCode::kInvalidArgument, "trials must be positive");
  SimConfig sim;
  sim.seed = cfg.seed;
  sim.max_ticket = cfg.trials;
  World w(sim);
  auto& card = w.add_card("card");
  auto& v_secret = w.add_validator("V-secret", true);
  auto& v_public = w.add_validator("V-public", false);
  const auto& pp = w.pp();

  Samples token_request;
  std::uint64_t other_card_pairings = 0;
  token_request.time([&] {
    w.register_card("card");
    w.request_token("card");
  });
  for (std::uint32_t i = 1; i < cfg.trials; ++i) {
    std::string name = "user" + std::to_string(i);
    auto& extra = w.add_card(name);
    token_request.time([&] {
      w.register_card(name);
      w.request_token(name);
    });
    other_card_pairings += extra.ctx.pairing_count();
  }

  Samples precompute, auth, issue, verify_secret, verify_public, total_secret, total_public;
  std::uint64_t precompute_ops = 0, issue_ops = 0, verify_secret_ops = 0, verify_public_ops = 0;
  std::size_t session_bytes = 0, ticket_bytes = 0, compact_bytes = 0;
  for (std::uint32_t i = 0; i < cfg.trials; ++i) {
    std::uint32_t k = *next_unused_index(*card.token);
    std::uint64_t ops0 = group_op_count();
    auto session = precompute.time([&] { return TicketSession::precompute(card.ctx, pp, *card.token, k, card.rng); });
    precompute_ops += group_op_count() - ops0;
    session_bytes = session.serialize().size();

    auto t_auth = Clock::now();
    auto ach = validator_auth_challenge(*card.token, card.rng);
    auto resp = validator_auth_respond(v_secret.rsa, ach, w.now(), true);
    validator_auth_check(v_secret.rsa.pub, ach, resp, *card.token);
    auth.add(std::chrono::duration<double, std::milli>(Clock::now() - t_auth).count());

    Scalar ch = random_nonzero_scalar(v_secret.rng);
    ops0 = group_op_count();
    MTicket ticket = issue.time([&] { return ticket_issue(session, *card.token, ch, w.now()); });
    issue_ops += group_op_count() - ops0;
    ticket_bytes = ticket.serialize().size();
    MTicket compact = ticket;
    compact.pi.C.reset();
    compact.pi.D.reset();
    compact_bytes = compact.serialize().size();

    ops0 = group_op_count();
    bool ok1 = verify_secret.time(
        [&] { return ticket_verify(v_secret.ctx, pp, compact, ch, VerifierSecretKeys{*v_secret.keys}).ok; });
    verify_secret_ops += group_op_count() - ops0;
    ops0 = group_op_count();
    bool ok2 = verify_public.time([&] { return ticket_verify(v_public.ctx, pp, ticket, ch, VerifierPublic{}).ok; });
    verify_public_ops += group_op_count() - ops0;
    if (!ok1 || !ok2) throw Error(ErrorCode::kInternal, "bench ticket failed to verify");

    std::size_t n = auth.values().size() - 1;
    total_secret.add(auth.values()[n] + issue.values()[n] + verify_secret.values()[n]);
    total_public.add(auth.values()[n] + issue.values()[n] + verify_public.values()[n]);
  }

  // The set-membership proof on its own.
  GroupContext smp_card = card.ctx.fork(), smp_secret = card.ctx.fork(), smp_public = card.ctx.fork();
  Samples smp_pre, smp_fin, smp_ver_secret, smp_ver_public;
  std::size_t smp_bytes = 0, smp_compact_bytes = 0;
  Rng rng(cfg.seed ^ 0x5347);
  for (std::uint32_t i = 0; i < cfg.trials; ++i) {
    std::uint64_t k = 1 + i % pp.max_ticket;
    Scalar nu = random_scalar(rng), ch = random_nonzero_scalar(rng);
    auto s = smp_pre.time([&] { return SmpSession::precompute(smp_card, pp.sigma, pp.hT, k, nu, rng); });
    auto proof = smp_fin.time([&] { return s.finalize(ch); });
    smp_bytes = proof.serialize().size();
    SmpProof compact = proof;
    compact.D.reset();
    smp_compact_bytes = compact.serialize().size();
    bool ok1 = smp_ver_secret.time([&] { return smp_verify(smp_secret, pp.hT, compact, ch, SmpSecretKey{v_secret.keys->y}); });
    bool ok2 = smp_ver_public.time([&] { return smp_verify(smp_public, pp.hT, proof, ch, SmpPublicKey{pp.Y}); });
    if (!ok1 || !ok2) throw Error(ErrorCode::kInternal, "bench set-membership proof failed to verify");
  }

  BenchReport r;
  r.phases = {token_request.summary("token_request"),
              precompute.summary("ticket_precompute"),
              auth.summary("validator_authentication"),
              issue.summary("ticket_issue"),
              verify_secret.summary("verify_secret_keys"),
              verify_public.summary("verify_public"),
              total_secret.summary("validation_total_secret_keys"),
              total_public.summary("validation_total_public"),
              smp_pre.summary("smp_precompute"),
              smp_fin.summary("smp_finalize"),
              smp_ver_secret.summary("smp_verify_secret_key"),
              smp_ver_public.summary("smp_verify_public")};

  std::uint64_t T = cfg.trials;
  r.pairings = {{"card", card.ctx.pairing_count() + smp_card.pairing_count() + other_card_pairings},
                {"validator_secret_keys", v_secret.ctx.pairing_count()},
                {"validator_public", v_public.ctx.pairing_count()},
                {"smp_verifier_secret_key", smp_secret.pairing_count()},
                {"smp_verifier_public", smp_public.pairing_count()}};
  r.group_ops = {{"card.precompute_per_ticket", precompute_ops / T},
                 {"card.issue_per_ticket", issue_ops / T},
                 {"validator.verify_secret_keys_per_ticket", verify_secret_ops / T},
                 {"validator.verify_public_per_ticket", verify_public_ops / T}};
  r.sizes = {{"session", session_bytes},
             {"ticket", ticket_bytes},
             {"ticket_compact", compact_bytes},
             {"smp_proof", smp_bytes},
             {"smp_proof_compact", smp_compact_bytes},
             {"public_parameters", pp.serialize().size()}};
  r.checks = {{"card pairings", 0, r.pairings["card"]},
              {"secret-key validator pairings", 0, v_secret.ctx.pairing_count()},
              {"public validator pairings per verify", 4, v_public.ctx.pairing_count() / T},
              {"public validator pairings total", 4 * T, v_public.ctx.pairing_count()},
              {"smp secret-key verify pairings", 0, smp_secret.pairing_count()},
              {"smp public verify pairings per verify", 2, smp_public.pairing_count() / T},
              {"ticket_issue group ops", 0, issue_ops},
              {"session bytes", kSessionBytes, session_bytes},
              {"ticket bytes", kTicketBytes, ticket_bytes},
              {"compact ticket bytes", kCompactTicketBytes, compact_bytes}};
  return r;
}

}  // namespace mtkt
