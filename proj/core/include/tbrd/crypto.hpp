#pragma once

#include <span>

#include "tbrd/bytes.hpp"

namespace tbrd::crypto {

Key32 sha256(std::span<const uint8_t> data);

// HMAC-SHA-256, full 32-byte output. Empty messages are allowed.
Key32 hmac_sha256(std::span<const uint8_t> key, std::span<const uint8_t> msg);

// Cryptographically secure randomness (OpenSSL RAND).
Key32 random_key32();

// Constant-time comparison.
bool equal(const Key32& a, const Key32& b);

}  // namespace tbrd::crypto
