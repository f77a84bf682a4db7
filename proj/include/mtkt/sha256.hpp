#pragma once

#include <array>
#include <memory>

#include "mtkt/bytes.hpp"

namespace mtkt {

using Digest = std::array<std::uint8_t, 32>;

// Incremental SHA-256 backed by OpenSSL's EVP interface.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(Sha256&&) noexcept;
  Sha256& operator=(Sha256&&) noexcept;

  Sha256& update(ByteView data);
  Sha256& update(std::string_view s);
  Digest finish();

  static Digest hash(ByteView data);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mtkt
