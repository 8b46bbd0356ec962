#include "tbrd/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <stdexcept>

#include "tbrd/bytes.hpp"

namespace tbrd {

std::string to_hex(std::span<const uint8_t> data) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

static int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("hex: odd length");
  Bytes out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("hex: bad digit");
    out[i] = static_cast<uint8_t>((hi << 4) | lo);
  }
  return out;
}

Key32 key_from_hex(std::string_view hex) {
  if (hex.size() != 64) throw std::invalid_argument("key hex must be 64 chars");
  Bytes raw = from_hex(hex);
  Key32 k;
  std::copy(raw.begin(), raw.end(), k.begin());
  return k;
}

void put_u16le(Bytes& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xff));
  out.push_back(static_cast<uint8_t>(v >> 8));
}
void put_i16le(Bytes& out, int16_t v) { put_u16le(out, static_cast<uint16_t>(v)); }
void put_u32le(Bytes& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}
void put_i32le(Bytes& out, int32_t v) { put_u32le(out, static_cast<uint32_t>(v)); }
void put_u32be(Bytes& out, uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint16_t get_u16le(std::span<const uint8_t> in, size_t off) {
  return static_cast<uint16_t>(in[off] | (in[off + 1] << 8));
}
int16_t get_i16le(std::span<const uint8_t> in, size_t off) {
  return static_cast<int16_t>(get_u16le(in, off));
}
uint32_t get_u32le(std::span<const uint8_t> in, size_t off) {
  return static_cast<uint32_t>(in[off]) | (static_cast<uint32_t>(in[off + 1]) << 8) |
         (static_cast<uint32_t>(in[off + 2]) << 16) |
         (static_cast<uint32_t>(in[off + 3]) << 24);
}
int32_t get_i32le(std::span<const uint8_t> in, size_t off) {
  return static_cast<int32_t>(get_u32le(in, off));
}
uint32_t get_u32be(std::span<const uint8_t> in, size_t off) {
  return (static_cast<uint32_t>(in[off]) << 24) |
         (static_cast<uint32_t>(in[off + 1]) << 16) |
         (static_cast<uint32_t>(in[off + 2]) << 8) | static_cast<uint32_t>(in[off + 3]);
}

namespace crypto {

Key32 sha256(std::span<const uint8_t> data) {
  Key32 out;
  SHA256(data.data(), data.size(), out.data());
  return out;
}

Key32 hmac_sha256(std::span<const uint8_t> key, std::span<const uint8_t> msg) {
  Key32 out;
  unsigned int len = out.size();
  // HMAC tolerates a null data pointer only with zero length; normalize.
  static const uint8_t empty = 0;
  const uint8_t* data = msg.empty() ? &empty : msg.data();
  if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data, msg.size(),
            out.data(), &len) ||
      len != out.size()) {
    throw std::runtime_error("HMAC-SHA-256 failed");
  }
  return out;
}

Key32 random_key32() {
  Key32 out;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw std::runtime_error("RAND_bytes failed");
  }
  return out;
}

bool equal(const Key32& a, const Key32& b) {
  return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace crypto
}  // namespace tbrd
