#include "mtkt/ledger.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace mtkt {

namespace {

constexpr std::uint8_t kKindRegistration = 1;
constexpr std::uint8_t kKindUsed = 2;

std::string encode_line(std::uint8_t kind, const Bytes& payload) {
  ByteWriter w;
  w.u8(kLedgerVersion);
  w.u8(kind);
  w.u32(static_cast<std::uint32_t>(payload.size()));
  w.raw(payload);
  return to_hex(w.bytes());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view text, bool append) {
  std::ofstream out(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::kInvalidArgument, "write failed for " + path.string());
}

// Splits on '\n'; a final line without terminator is still a line.
std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

Bytes hex_at(std::string_view hex, std::size_t line, std::size_t column) {
  try {
    return from_hex(hex);
  } catch (const Error& e) {
    throw ParseError(line, column, e.what());
  }
}

template <class T>
bool same_by_bytes(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].serialize() != b[i].serialize()) return false;
  }
  return true;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return false;
  }
  return true;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t byte, const std::string& what)
    : Error(ErrorCode::kParse, "line " + std::to_string(line) + ", byte " + std::to_string(byte) + ": " + what),
      line_(line),
      byte_(byte) {}

std::string db_encode_line(const RegistrationRecord& rec) { return encode_line(kKindRegistration, rec.serialize()); }
std::string db_encode_line(const UsedTicketRecord& rec) { return encode_line(kKindUsed, rec.serialize()); }

Ledger db_parse(std::string_view text) {
  Ledger out;
  auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::size_t line = i + 1;
    std::string_view hex = lines[i];
    if (!hex.empty() && hex.back() == '\r') hex.remove_suffix(1);
    if (hex.empty()) continue;
    Bytes blob = hex_at(hex, line, 0);
    ByteReader r(blob);
    std::uint8_t kind = 0;
    Bytes payload;
    try {
      std::uint8_t version = r.u8();
      if (version != kLedgerVersion) throw ParseError(line, 0, "unsupported version " + std::to_string(version));
      kind = r.u8();
      std::uint32_t len = r.u32();
      if (r.remaining() != len) {
        throw ParseError(line, r.offset(),
                         "length field says " + std::to_string(len) + ", found " + std::to_string(r.remaining()));
      }
      auto raw = r.raw(len);
      payload.assign(raw.begin(), raw.end());
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line, r.offset(), e.what());
    }
    try {
      if (kind == kKindRegistration) {
        out.reg.push_back(RegistrationRecord::deserialize(payload));
      } else if (kind == kKindUsed) {
        out.used.push_back(UsedTicketRecord::deserialize(payload));
      } else {
        throw ParseError(line, 1, "unknown record kind " + std::to_string(kind));
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line, 6, std::string("bad record: ") + e.what());
    }
  }
  return out;
}

void db_store(const std::filesystem::path& path, const Ledger& ledger) {
  std::string text;
  for (const auto& r : ledger.reg) text += db_encode_line(r) + "\n";
  for (const auto& r : ledger.used) text += db_encode_line(r) + "\n";
  auto tmp = path;
  tmp += ".tmp";
  write_file(tmp, text, false);
  std::filesystem::rename(tmp, path);
}

Ledger db_load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return {};
  return db_parse(read_file(path));
}

void db_append(const std::filesystem::path& path, const RegistrationRecord& rec) {
  write_file(path, db_encode_line(rec) + "\n", true);
}

void db_append(const std::filesystem::path& path, const UsedTicketRecord& rec) {
  write_file(path, db_encode_line(rec) + "\n", true);
}

bool same_records(const std::vector<UsedTicketRecord>& a, const std::vector<UsedTicketRecord>& b) {
  return same_by_bytes(a, b);
}

bool same_records(const std::vector<RegistrationRecord>& a, const std::vector<RegistrationRecord>& b) {
  return same_by_bytes(a, b);
}

// ---- Transcript ---------------------------------------------------------------------

const Frame& Transcript::record(std::string_view sender, std::string_view receiver, std::string_view label,
                                Bytes payload) {
  if (!valid_name(sender) || !valid_name(receiver) || !valid_name(label) ||
      sender.find("->") != std::string_view::npos) {
    throw Error(ErrorCode::kInvalidArgument, "frame names must be non-empty without whitespace");
  }
  frames_.push_back(
      {frames_.size() + 1, std::string(sender), std::string(receiver), std::string(label), std::move(payload)});
  return frames_.back();
}

std::string Transcript::text() const {
  std::string out;
  for (const auto& f : frames_) {
    out += std::to_string(f.seq) + " " + f.sender + "->" + f.receiver + " " + f.label + " " + to_hex(f.payload) +
           "\n";
  }
  return out;
}

Transcript Transcript::parse(std::string_view text) {
  Transcript t;
  auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::size_t line = i + 1;
    std::string_view l = lines[i];
    if (l.empty()) continue;
    std::size_t a = l.find(' ');
    std::size_t b = a == std::string_view::npos ? a : l.find(' ', a + 1);
    std::size_t c = b == std::string_view::npos ? b : l.find(' ', b + 1);
    if (c == std::string_view::npos) throw ParseError(line, l.size(), "expected four fields");
    Frame f;
    try {
      f.seq = std::stoull(std::string(l.substr(0, a)));
    } catch (const std::exception&) {
      throw ParseError(line, 0, "bad sequence number");
    }
    std::string_view route = l.substr(a + 1, b - a - 1);
    std::size_t arrow = route.find("->");
    if (arrow == std::string_view::npos) throw ParseError(line, a + 1, "expected sender->receiver");
    f.sender = route.substr(0, arrow);
    f.receiver = route.substr(arrow + 2);
    f.label = l.substr(b + 1, c - b - 1);
    f.payload = hex_at(l.substr(c + 1), line, c + 1);
    if (f.seq != t.frames_.size() + 1) throw ParseError(line, 0, "sequence numbers must count up from 1");
    t.frames_.push_back(std::move(f));
  }
  return t;
}

void Transcript::write(const std::filesystem::path& path) const { write_file(path, text(), false); }
void Transcript::append_to(const std::filesystem::path& path) const { write_file(path, text(), true); }

std::vector<UsedTicketRecord> replay_used_tickets(const Transcript& t) {
  struct Session {
    std::optional<Scalar> ch;
    std::optional<MTicket> ticket;
  };
  std::map<std::pair<std::string, std::string>, Session> sessions;  // (validator, card)
  std::map<std::string, Report> reports;                            // by card
  std::vector<UsedTicketRecord> out;
  for (const auto& f : t.frames()) {
    if (f.label == frame_label::kChallenge) {
      sessions[{f.sender, f.receiver}] = {decode_scalar(f.payload), std::nullopt};
    } else if (f.label == frame_label::kTicket) {
      sessions[{f.receiver, f.sender}].ticket = MTicket::deserialize(f.payload);
    } else if (f.label == frame_label::kVerdict) {
      ByteReader r(f.payload);
      bool ok = r.u8() != 0;
      std::uint64_t dt = r.u64();
      auto& s = sessions[{f.sender, f.receiver}];
      if (ok && s.ch && s.ticket) out.push_back({*s.ticket, *s.ch, f.sender, dt});
      s = {};
    } else if (f.label == frame_label::kReport) {
      reports[f.sender] = Report::deserialize(f.payload);
    } else if (f.label == frame_label::kReceipt) {
      ByteReader r(f.payload);
      bool ok = r.u8() != 0;
      std::uint64_t dt = r.u64();
      auto it = reports.find(f.receiver);
      if (ok && it != reports.end()) {
        for (const auto& tk : it->second.tickets) {
          out.push_back({tk, report_challenge(tk.Bk, it->second.day), std::string(kReportValidatorId), dt});
        }
      }
      if (it != reports.end()) reports.erase(it);
    }
  }
  return out;
}

}  // namespace mtkt
