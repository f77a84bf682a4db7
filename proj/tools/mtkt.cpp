// Command-line front end for the simulator. State lives in a directory
// (--state, default ./mtkt-state) that every command loads and saves.

#include <chrono>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "mtkt/harness.hpp"

using namespace mtkt;

namespace {

std::vector<std::uint32_t> parse_list(const std::string& s) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<std::uint32_t>(std::stoul(item)));
  return out;
}

std::uint64_t wall_clock() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count());
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open " + path);
  std::string s((std::istreambuf_iterator<char>(in)), {});
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
}

std::vector<std::uint32_t> default_quorum(const World& w) {
  std::vector<std::uint32_t> q;
  for (std::uint32_t i = 1; i <= w.pp().threshold; ++i) q.push_back(i);
  return q;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving m-ticketing simulator"};
  app.require_subcommand(1);
  std::string state = "mtkt-state";
  std::optional<std::uint64_t> now_opt;
  app.add_option("--state", state, "State directory");
  app.add_option("--now", now_opt, "Current time, unix seconds (default: wall clock)");

  auto* setup_cmd = app.add_subcommand("setup", "Create a new system");
  std::uint32_t max_ticket = 10;
  std::uint64_t deadline = 0;
  std::string threshold = "2,3";
  std::string out_dir;
  setup_cmd->add_option("--max-ticket", max_ticket, "Tickets per permission token")->capture_default_str();
  setup_cmd->add_option("--deadline", deadline, "Token expiry, unix seconds (default: now + 30 days)");
  setup_cmd->add_option("--threshold", threshold, "t,n for the revocation authorities")->capture_default_str();
  setup_cmd->add_option("--out", out_dir, "State directory to create (default: --state)");

  std::string id;
  auto* register_cmd = app.add_subcommand("register", "Create a card and register its user");
  register_cmd->add_option("--id", id, "User identifier")->required();

  auto* token_cmd = app.add_subcommand("request-token", "Obtain a permission token");
  token_cmd->add_option("--id", id, "User identifier")->required();

  auto* validate_cmd = app.add_subcommand("validate", "Validate one ticket at a validator");
  bool with_keys = false;
  std::string validator_name, ticket_out;
  validate_cmd->add_option("--id", id, "User identifier")->required();
  validate_cmd->add_flag("--with-keys", with_keys, "Validator holds the secret keys (no pairings)");
  validate_cmd->add_option("--validator", validator_name, "Validator name (default: V-secret or V-public)");
  validate_cmd->add_option("--ticket-out", ticket_out, "Write the ticket as hex");

  auto* report_cmd = app.add_subcommand("report", "Report all unused tickets");
  report_cmd->add_option("--id", id, "User identifier")->required();

  std::string ticket_file, quorum_text;
  auto* revoke_user_cmd = app.add_subcommand("revoke-user", "Identify the owner of a ticket");
  revoke_user_cmd->add_option("--ticket", ticket_file, "File holding a hex ticket")->required();
  revoke_user_cmd->add_option("--quorum", quorum_text, "Authority indices, e.g. 1,3 (default: 1..t)");

  auto* revoke_tickets_cmd = app.add_subcommand("revoke-tickets", "List every serial number of a user");
  revoke_tickets_cmd->add_option("--id", id, "User identifier")->required();
  revoke_tickets_cmd->add_option("--quorum", quorum_text, "Authority indices (default: 1..t)");

  std::string serial_hex;
  auto* dup_cmd = app.add_subcommand("ident-duplicate", "Count records carrying a serial number");
  dup_cmd->add_option("--serial", serial_hex, "Compressed serial number, hex")->required();

  std::string scenario_name, transcript_out;
  SimConfig scenario_cfg;
  std::string scenario_threshold;
  auto* scenario_cmd = app.add_subcommand("scenario", "Run a scripted scenario");
  scenario_cmd->add_option("name", scenario_name, "Scenario name")->required()->check(CLI::IsMember(scenario_names()));
  scenario_cmd->add_option("--transcript", transcript_out, "Write the transcript here");
  scenario_cmd->add_option("--max-ticket", scenario_cfg.max_ticket, "Tickets per token")->capture_default_str();
  scenario_cmd->add_option("--threshold", scenario_threshold, "t,n (default 2,3)");

  BenchConfig bench_cfg;
  std::string bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "Time the validation phases and check counters");
  bench_cmd->add_option("--trials", bench_cfg.trials, "Trials per phase")->capture_default_str();
  bench_cmd->add_option("--out", bench_out, "Write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    std::uint64_t now = now_opt.value_or(wall_clock());
    std::uint64_t seed = Rng::env_seed().value_or(1);

    if (*scenario_cmd) {
      scenario_cfg.seed = seed;
      if (!scenario_threshold.empty()) {
        auto tn = parse_list(scenario_threshold);
        if (tn.size() != 2) throw Error(ErrorCode::kInvalidArgument, "--threshold takes t,n");
        scenario_cfg.threshold = tn[0];
        scenario_cfg.authorities = tn[1];
      }
      auto r = run_scenario(scenario_name, scenario_cfg);
      for (const auto& n : r.notes) std::cout << n << "\n";
      if (!transcript_out.empty()) write_text(transcript_out, r.transcript);
      if (!r.ok) {
        std::cerr << scenario_name << ": FAILED: " << r.divergence << "\n";
        return 1;
      }
      std::cout << scenario_name << ": passed\n";
      return 0;
    }

    if (*bench_cmd) {
      bench_cfg.seed = seed;
      auto r = bench(bench_cfg);
      std::cout << r.to_table();
      if (!bench_out.empty()) write_text(bench_out, r.to_json());
      return r.ok() ? 0 : 1;
    }

    if (*setup_cmd) {
      auto tn = parse_list(threshold);
      if (tn.size() != 2) throw Error(ErrorCode::kInvalidArgument, "--threshold takes t,n");
      SimConfig cfg;
      cfg.seed = seed;
      cfg.max_ticket = max_ticket;
      cfg.now = now;
      cfg.deadline = deadline ? deadline : now + 30 * kSecondsPerDay;
      cfg.threshold = tn[0];
      cfg.authorities = tn[1];
      std::filesystem::path dir = out_dir.empty() ? state : out_dir;
      if (std::filesystem::exists(dir / "params.bin")) {
        throw Error(ErrorCode::kInvalidArgument, dir.string() + " already holds a system");
      }
      World w(cfg, Rng::from_environment());
      w.save(dir);
      std::cout << "system created in " << dir.string() << ": max_ticket " << cfg.max_ticket << ", deadline "
                << cfg.deadline << ", threshold " << cfg.threshold << "-of-" << cfg.authorities << "\n";
      return 0;
    }

    auto w = World::load(state, now, Rng::from_environment());
    int status = 0;
    if (*register_cmd) {
      w->add_card(id);
      w->register_card(id);
      std::cout << "registered " << id << "\n";
    } else if (*token_cmd) {
      w->request_token(id);
      std::cout << "token issued to " << id << " for " << w->pp().max_ticket << " tickets\n";
    } else if (*validate_cmd) {
      std::string vname = validator_name.empty() ? (with_keys ? "V-secret" : "V-public") : validator_name;
      try {
        w->validator(vname);
      } catch (const Error&) {
        w->add_validator(vname, with_keys);
      }
      auto out = w->validate(id, vname);
      if (out.ticket && !ticket_out.empty()) write_text(ticket_out, to_hex(out.ticket->serialize()) + "\n");
      if (out.accepted) {
        std::cout << "accepted serial " << to_hex(out.ticket->Bk.encode()) << "\n";
        if (out.duplicates > 1) std::cout << "duplicate: serial seen " << out.duplicates << " times\n";
      } else {
        std::cout << "rejected: " << out.detail << "\n";
        status = 1;
      }
    } else if (*report_cmd) {
      auto out = w->report(id);
      std::cout << (out.accepted ? "report accepted: " : "report rejected: ") << out.serials.size()
                << " unused tickets\n";
      if (out.duplicates) std::cout << out.duplicates << " reported serials were already used\n";
      status = out.accepted ? 0 : 1;
    } else if (*revoke_user_cmd) {
      auto ticket = MTicket::deserialize(from_hex(read_text(ticket_file)));
      auto quorum = quorum_text.empty() ? default_quorum(*w) : parse_list(quorum_text);
      auto who = w->revoke_user(ticket, quorum);
      std::cout << (who ? *who : std::string("no registered user")) << "\n";
      status = who ? 0 : 1;
    } else if (*revoke_tickets_cmd) {
      auto quorum = quorum_text.empty() ? default_quorum(*w) : parse_list(quorum_text);
      for (const auto& s : w->revoke_tickets(id, quorum)) std::cout << to_hex(s.encode()) << "\n";
    } else if (*dup_cmd) {
      std::cout << w->ident_duplicate(G1::decode(from_hex(serial_hex))) << "\n";
    }
    w->save(state);
    return status;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
