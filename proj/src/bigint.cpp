#include "mtkt/bigint.hpp"

#include "mtkt/error.hpp"

namespace mtkt {

mpz_class scalar_to_mpz(const Scalar& s) {
  auto bytes = s.to_bytes();
  return mpz_from_bytes(bytes);
}

const mpz_class& group_order() {
  static const mpz_class p(GroupContext::group_order_decimal(), 10);
  return p;
}

Scalar scalar_from_mpz(const mpz_class& v) {
  mpz_class r = v % group_order();
  if (r < 0) r += group_order();
  return decode_scalar(mpz_to_fixed(r, kScalarBytes));
}

Bytes mpz_to_bytes(const mpz_class& v) {
  if (v < 0) throw Error(ErrorCode::kInvalidArgument, "negative integer has no encoding");
  if (v == 0) return {};
  Bytes out((mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8);
  std::size_t written = 0;
  mpz_export(out.data(), &written, 1, 1, 1, 0, v.get_mpz_t());
  out.resize(written);
  return out;
}

mpz_class mpz_from_bytes(ByteView b) {
  mpz_class v;
  if (!b.empty()) mpz_import(v.get_mpz_t(), b.size(), 1, 1, 1, 0, b.data());
  return v;
}

Bytes mpz_to_fixed(const mpz_class& v, std::size_t len) {
  Bytes mag = mpz_to_bytes(v);
  if (mag.size() > len) throw Error(ErrorCode::kInvalidArgument, "integer does not fit in field");
  Bytes out(len - mag.size(), 0);
  append(out, mag);
  return out;
}

void write_mpz(ByteWriter& w, const mpz_class& v) { w.blob(mpz_to_bytes(v)); }

mpz_class read_mpz(ByteReader& r) {
  std::size_t at = r.offset();
  Bytes b = r.blob();
  if (!b.empty() && b[0] == 0) throw Error(ErrorCode::kDecode, "non-minimal integer at offset " + std::to_string(at));
  return mpz_from_bytes(b);
}

mpz_class random_bits(Rng& rng, std::size_t bits) {
  Bytes buf = rng.bytes((bits + 7) / 8);
  if (bits % 8 != 0) buf[0] &= static_cast<std::uint8_t>((1u << (bits % 8)) - 1);
  return mpz_from_bytes(buf);
}

mpz_class random_below(Rng& rng, const mpz_class& bound) {
  if (bound <= 0) throw Error(ErrorCode::kInvalidArgument, "empty range");
  std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  while (true) {
    mpz_class v = random_bits(rng, bits);
    if (v < bound) return v;
  }
}

}  // namespace mtkt
