#pragma once

// Multi-actor simulator. Every message between actors is serialized, logged
// to the transcript and deserialized by the receiver, so the flows exercise
// the exact wire encodings. Each actor works on its own context fork, which
// gives per-role pairing counts.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mtkt/ledger.hpp"
#include "mtkt/mticketing.hpp"

namespace mtkt {

struct SimConfig {
  std::uint64_t seed = 1;
  std::uint32_t max_ticket = 10;
  std::uint64_t now = 1'700'000'000;
  std::uint64_t deadline = 1'700'000'000 + 30 * kSecondsPerDay;
  std::uint32_t threshold = 2, authorities = 3;
};

// The user's SIM card: x_U, the permission token and at most one precomputed
// session. Never holds gamma, y or x_T.
struct CardActor {
  std::string name;
  GroupContext ctx;
  Rng rng;
  UserKeys user;
  std::optional<PermissionToken> token;
  std::optional<TicketSession> pending;

  // Off-line step: precompute the smallest unused index if nothing is pending.
  void prepare(const PublicParameters& pp);

  // user | token? | session?
  Bytes serialize() const;
  static std::unique_ptr<CardActor> restore(std::string name, GroupContext ctx, Rng rng, ByteView state);
};

struct ValidatorActor {
  std::string name;
  GroupContext ctx;
  Rng rng;
  RsaKeyPair rsa;
  std::optional<VerifierSecretKeys> keys;  // secret-key verification mode
  std::set<Bytes> nonces;                  // challenges handed out

  Bytes serialize() const;
  static std::unique_ptr<ValidatorActor> restore(std::string name, GroupContext ctx, Rng rng, ByteView state);
};

struct TransportAuthorityActor {
  GroupContext ctx;
  Rng rng;
  TAKeys keys;
  Ledger ledger;
  std::vector<G1> flagged;  // serials seen at least twice
};

struct RevocationAuthorityActor {
  std::uint32_t index = 0;
  GroupContext ctx;
  RevocationShare share;
};

struct ValidationOutcome {
  bool accepted = false;
  std::optional<ErrorCode> error;  // set when either side aborted
  std::string detail;              // failed check or error text
  std::optional<MTicket> ticket;
  std::size_t duplicates = 0;      // records with this serial once stored
};

struct ReportOutcome {
  bool accepted = false;
  std::string detail;
  std::vector<G1> serials;
  std::size_t duplicates = 0;  // reported serials already in DB_UsedTickets
};

class World {
 public:
  // Runs setup with a deterministic generator derived from cfg.seed.
  explicit World(const SimConfig& cfg);
  World(const SimConfig& cfg, Rng rng);

  // State directory: params.bin, ta.key, ra-<i>.key, validator-<name>.key,
  // card-<name>.state, ledger.db, transcript.txt.
  void save(const std::filesystem::path& dir) const;
  static std::unique_ptr<World> load(const std::filesystem::path& dir, std::uint64_t now, Rng rng);

  const PublicParameters& pp() const { return pp_; }
  std::uint64_t now() const { return now_; }
  void set_now(std::uint64_t t) { now_ = t; }
  Transcript& transcript() { return transcript_; }
  const Transcript& transcript() const { return transcript_; }
  TransportAuthorityActor& ta() { return *ta_; }
  const TransportAuthorityActor& ta() const { return *ta_; }

  CardActor& add_card(const std::string& name);
  ValidatorActor& add_validator(const std::string& name, bool with_keys);
  CardActor& card(const std::string& name);
  ValidatorActor& validator(const std::string& name);
  RevocationAuthorityActor& authority(std::uint32_t index);
  std::uint32_t authority_count() const { return static_cast<std::uint32_t>(authorities_.size()); }
  const std::map<std::string, std::unique_ptr<CardActor>>& cards() const { return cards_; }

  // A bit-for-bit copy of a card's state under a new name, as a cloned SIM.
  CardActor& clone_card(const std::string& from, const std::string& name);

  void register_card(const std::string& card);
  void request_token(const std::string& card);
  // Mutual flow: validator authentication, challenge, ticket, verdict.
  ValidationOutcome validate(const std::string& card, const std::string& validator);
  ReportOutcome report(const std::string& card);

  // Threshold decryption through the named authorities (1-based indices).
  std::optional<std::string> revoke_user(const MTicket& ticket, const std::vector<std::uint32_t>& quorum);
  std::vector<G1> revoke_tickets(const std::string& user_id, const std::vector<std::uint32_t>& quorum);
  std::size_t ident_duplicate(const G1& serial) const;

 private:
  World(const SimConfig& cfg, Rng rng, bool run_setup);
  Bytes send(std::string_view from, std::string_view to, std::string_view label, Bytes payload);
  void store_used(UsedTicketRecord rec, std::size_t& duplicates);

  GroupContext base_;
  Rng rng_;
  std::uint64_t now_ = 0;
  PublicParameters pp_;
  std::unique_ptr<TransportAuthorityActor> ta_;
  std::vector<std::unique_ptr<RevocationAuthorityActor>> authorities_;
  std::map<std::string, std::unique_ptr<CardActor>> cards_;
  std::map<std::string, std::unique_ptr<ValidatorActor>> validators_;
  Transcript transcript_;
};

// ---- Scenarios -----------------------------------------------------------------------

struct ScenarioResult {
  bool ok = false;
  std::string divergence;          // first expectation that failed
  std::vector<std::string> notes;  // one line per checked expectation
  std::string transcript;
};

const std::vector<std::string>& scenario_names();
// Throws kInvalidArgument for an unknown name.
ScenarioResult run_scenario(std::string_view name, const SimConfig& cfg);

// ---- Bench ---------------------------------------------------------------------------

struct BenchConfig {
  std::uint32_t trials = 50;
  std::uint64_t seed = 1;
};

struct PhaseTiming {
  std::string name;
  double mean_ms = 0, stddev_ms = 0;
  std::uint32_t trials = 0;
};

struct BenchCheck {
  std::string name;
  std::uint64_t expected = 0, observed = 0;
  bool ok() const { return expected == observed; }
};

struct BenchReport {
  std::vector<PhaseTiming> phases;
  std::map<std::string, std::uint64_t> pairings;   // per role
  std::map<std::string, std::uint64_t> group_ops;  // per role and phase
  std::map<std::string, std::uint64_t> sizes;      // bytes
  std::vector<BenchCheck> checks;

  bool ok() const;
  std::string to_json() const;
  std::string to_table() const;
};

BenchReport bench(const BenchConfig& cfg);

}  // namespace mtkt
