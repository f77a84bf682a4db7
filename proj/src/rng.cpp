#include "mtkt/rng.hpp"

#include <cstdlib>
#include <random>
#include <string>

namespace mtkt {

Rng::Rng(std::uint64_t seed) {
  ByteWriter w;
  w.raw(to_bytes("mtkt/rng/v1"));
  w.u64(seed);
  key_ = Sha256::hash(w.bytes());
}

Rng::Rng(ByteView seed) {
  key_ = Sha256().update("mtkt/rng/v1").update(seed).finish();
}

std::optional<std::uint64_t> Rng::env_seed() {
  const char* env = std::getenv("MTKT_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  return std::stoull(env, nullptr, 0);
}

Rng Rng::from_environment() {
  if (auto seed = env_seed()) return Rng(*seed);
  std::random_device rd;
  Bytes seed(32);
  for (std::size_t i = 0; i < seed.size(); i += 4) {
    std::uint32_t v = rd();
    for (std::size_t j = 0; j < 4; ++j) seed[i + j] = static_cast<std::uint8_t>(v >> (8 * j));
  }
  return Rng(ByteView(seed));
}

void Rng::refill() {
  ByteWriter w;
  w.raw(key_);
  w.u64(counter_++);
  block_ = Sha256::hash(w.bytes());
  used_ = 0;
}

void Rng::fill(std::span<std::uint8_t> out) {
  for (auto& b : out) {
    if (used_ == block_.size()) refill();
    b = block_[used_++];
  }
}

Bytes Rng::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

std::uint64_t Rng::u64() {
  std::uint8_t b[8];
  fill(b);
  std::uint64_t v = 0;
  for (auto x : b) v = v << 8 | x;
  return v;
}

Rng Rng::fork(std::string_view label) {
  Bytes seed = bytes(32);
  append(seed, ByteView(reinterpret_cast<const std::uint8_t*>(label.data()), label.size()));
  return Rng(ByteView(seed));
}

}  // namespace mtkt
