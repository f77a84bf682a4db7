#pragma once

#include <cstdint>
#include <optional>

#include "mtkt/bytes.hpp"
#include "mtkt/sha256.hpp"

namespace mtkt {

// Deterministic random bit generator: block_i = SHA-256(key || i). A seeded
// instance replays byte-for-byte, which is what makes scenario transcripts
// reproducible. One instance per session; not thread-safe.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  explicit Rng(ByteView seed);

  // Seed from MTKT_SEED when set, otherwise from std::random_device.
  static Rng from_environment();
  static std::optional<std::uint64_t> env_seed();

  void fill(std::span<std::uint8_t> out);
  Bytes bytes(std::size_t n);
  std::uint64_t u64();

  // Independent child stream, so actors can be given their own generators.
  Rng fork(std::string_view label);

 private:
  void refill();

  Digest key_{};
  std::uint64_t counter_ = 0;
  Digest block_{};
  std::size_t used_ = 32;
};

}  // namespace mtkt
