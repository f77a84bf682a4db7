#include "mtkt/sha256.hpp"

#include <openssl/evp.h>

#include "mtkt/error.hpp"

namespace mtkt {

struct Sha256::Impl {
  EVP_MD_CTX* ctx = nullptr;
  ~Impl() { EVP_MD_CTX_free(ctx); }
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {
  impl_->ctx = EVP_MD_CTX_new();
  if (impl_->ctx == nullptr || EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kInternal, "EVP sha256 init failed");
  }
}

Sha256::~Sha256() = default;
Sha256::Sha256(Sha256&&) noexcept = default;
Sha256& Sha256::operator=(Sha256&&) noexcept = default;

Sha256& Sha256::update(ByteView data) {
  if (!data.empty() && EVP_DigestUpdate(impl_->ctx, data.data(), data.size()) != 1) {
    throw Error(ErrorCode::kInternal, "EVP sha256 update failed");
  }
  return *this;
}

Sha256& Sha256::update(std::string_view s) {
  return update(ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

Digest Sha256::finish() {
  Digest out{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(impl_->ctx, out.data(), &len) != 1 || len != out.size()) {
    throw Error(ErrorCode::kInternal, "EVP sha256 final failed");
  }
  return out;
}

Digest Sha256::hash(ByteView data) { return Sha256().update(data).finish(); }

}  // namespace mtkt
