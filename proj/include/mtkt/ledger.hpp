#pragma once

// The transport authority's two append-only databases, their file format, and
// the wire transcript shared by all actors.
//
// Ledger file: one record per line, each line the hex encoding of
//   u8 version (1) | u8 kind (1 = registration, 2 = used ticket) | u32 length | payload
//
// Transcript file: one frame per line,
//   <seq> <sender>-><receiver> <label> <hex payload>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mtkt/error.hpp"
#include "mtkt/mticketing.hpp"

namespace mtkt {

struct Ledger {
  std::vector<RegistrationRecord> reg;   // DB_REG
  std::vector<UsedTicketRecord> used;    // DB_UsedTickets
};

// kParse with a 1-based line and a 0-based byte offset inside that line's blob
// (or character column for hex errors).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t byte, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t byte() const { return byte_; }

 private:
  std::size_t line_, byte_;
};

inline constexpr std::uint8_t kLedgerVersion = 1;

std::string db_encode_line(const RegistrationRecord& rec);
std::string db_encode_line(const UsedTicketRecord& rec);
Ledger db_parse(std::string_view text);

void db_store(const std::filesystem::path& path, const Ledger& ledger);
Ledger db_load(const std::filesystem::path& path);  // a missing file is an empty ledger
void db_append(const std::filesystem::path& path, const RegistrationRecord& rec);
void db_append(const std::filesystem::path& path, const UsedTicketRecord& rec);

bool same_records(const std::vector<UsedTicketRecord>& a, const std::vector<UsedTicketRecord>& b);
bool same_records(const std::vector<RegistrationRecord>& a, const std::vector<RegistrationRecord>& b);

// Frame labels the replay understands.
namespace frame_label {
inline constexpr std::string_view kAuthResponse = "auth_response";  // AuthResponse
inline constexpr std::string_view kChallenge = "challenge";         // 32-byte scalar
inline constexpr std::string_view kTicket = "ticket";               // MTicket
inline constexpr std::string_view kVerdict = "verdict";             // u8 ok | u64 dt | u32 duplicates
inline constexpr std::string_view kReport = "report";               // Report
inline constexpr std::string_view kReceipt = "receipt";             // u8 ok | u64 dt
}  // namespace frame_label

struct Frame {
  std::uint64_t seq = 0;
  std::string sender, receiver, label;
  Bytes payload;
};

class Transcript {
 public:
  // Names and labels must be non-empty and free of whitespace.
  const Frame& record(std::string_view sender, std::string_view receiver, std::string_view label, Bytes payload);
  const std::vector<Frame>& frames() const { return frames_; }
  std::size_t size() const { return frames_.size(); }

  std::string text() const;
  static Transcript parse(std::string_view text);
  void write(const std::filesystem::path& path) const;
  void append_to(const std::filesystem::path& path) const;

 private:
  std::vector<Frame> frames_;
};

// Rebuilds DB_UsedTickets from accepted validations and reports: a ticket frame
// followed by a positive verdict frame, or a report followed by a positive
// receipt. Uses the challenge and timestamp frames of the same session.
std::vector<UsedTicketRecord> replay_used_tickets(const Transcript& t);

}  // namespace mtkt
