#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ranemu {

using Bytes = std::vector<uint8_t>;
using BytesView = std::span<const uint8_t>;

Bytes from_hex(const std::string& hex);
std::string to_hex(BytesView data);

Bytes operator+(BytesView a, BytesView b);

inline Bytes to_bytes(const std::string& s) {
  return Bytes(s.begin(), s.end());
}
inline std::string to_string(BytesView b) {
  return std::string(b.begin(), b.end());
}

// Big-endian scalar append / read. Readers advance `offset`.
void put_u8(Bytes& out, uint8_t v);
void put_u16(Bytes& out, uint16_t v);
void put_u32(Bytes& out, uint32_t v);
void put_u48(Bytes& out, uint64_t v);
void put_u64(Bytes& out, uint64_t v);

uint8_t get_u8(BytesView in, size_t& offset);
uint16_t get_u16(BytesView in, size_t& offset);
uint32_t get_u32(BytesView in, size_t& offset);
uint64_t get_u48(BytesView in, size_t& offset);
uint64_t get_u64(BytesView in, size_t& offset);

// Deterministic key material for test/scenario provisioning: SHA-256 based
// expansion of (seed, label) into n bytes.
Bytes derive_bytes(uint64_t seed, const std::string& label, size_t n);

}  // namespace ranemu
