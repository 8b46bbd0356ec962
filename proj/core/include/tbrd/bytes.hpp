#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tbrd {

using Bytes = std::vector<uint8_t>;

// 32-byte value: chain keys, MAC keys, SHA-256 digests.
using Key32 = std::array<uint8_t, 32>;

std::string to_hex(std::span<const uint8_t> data);

// Strict: even length, lowercase/uppercase [0-9a-fA-F] only.
Bytes from_hex(std::string_view hex);

Key32 key_from_hex(std::string_view hex);  // requires exactly 64 hex chars

inline Bytes to_bytes(const Key32& k) { return Bytes(k.begin(), k.end()); }

// Little-endian scalar helpers for the wire codecs.
void put_u16le(Bytes& out, uint16_t v);
void put_i16le(Bytes& out, int16_t v);
void put_u32le(Bytes& out, uint32_t v);
void put_i32le(Bytes& out, int32_t v);
void put_u32be(Bytes& out, uint32_t v);

uint16_t get_u16le(std::span<const uint8_t> in, size_t off);
int16_t get_i16le(std::span<const uint8_t> in, size_t off);
uint32_t get_u32le(std::span<const uint8_t> in, size_t off);
int32_t get_i32le(std::span<const uint8_t> in, size_t off);
uint32_t get_u32be(std::span<const uint8_t> in, size_t off);

}  // namespace tbrd
