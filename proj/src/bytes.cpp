#include "ranemu/bytes.hpp"

#include <openssl/sha.h>

#include "ranemu/errors.hpp"

namespace ranemu {

namespace {
int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Bytes from_hex(const std::string& hex) {
  std::string clean;
  clean.reserve(hex.size());
  for (char c : hex) {
    if (c == ' ' || c == '\t') continue;
    clean.push_back(c);
  }
  if (clean.size() % 2 != 0) throw InvalidArgument("hex string has odd length");
  Bytes out(clean.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    int hi = hex_nibble(clean[2 * i]);
    int lo = hex_nibble(clean[2 * i + 1]);
    if (hi < 0 || lo < 0) throw InvalidArgument("invalid hex digit");
    out[i] = static_cast<uint8_t>(hi << 4 | lo);
  }
  return out;
}

std::string to_hex(BytesView data) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

Bytes operator+(BytesView a, BytesView b) {
  Bytes out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void put_u8(Bytes& out, uint8_t v) { out.push_back(v); }

void put_u16(Bytes& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void put_u32(Bytes& out, uint32_t v) {
  put_u16(out, static_cast<uint16_t>(v >> 16));
  put_u16(out, static_cast<uint16_t>(v));
}

void put_u48(Bytes& out, uint64_t v) {
  put_u16(out, static_cast<uint16_t>(v >> 32));
  put_u32(out, static_cast<uint32_t>(v));
}

void put_u64(Bytes& out, uint64_t v) {
  put_u32(out, static_cast<uint32_t>(v >> 32));
  put_u32(out, static_cast<uint32_t>(v));
}

namespace {
void need(BytesView in, size_t offset, size_t n) {
  if (offset + n > in.size()) throw MalformedPacket("truncated input");
}
}  // namespace

uint8_t get_u8(BytesView in, size_t& offset) {
  need(in, offset, 1);
  return in[offset++];
}

uint16_t get_u16(BytesView in, size_t& offset) {
  need(in, offset, 2);
  uint16_t v = static_cast<uint16_t>(in[offset] << 8 | in[offset + 1]);
  offset += 2;
  return v;
}

uint32_t get_u32(BytesView in, size_t& offset) {
  uint32_t hi = get_u16(in, offset);
  uint32_t lo = get_u16(in, offset);
  return hi << 16 | lo;
}

uint64_t get_u48(BytesView in, size_t& offset) {
  uint64_t hi = get_u16(in, offset);
  uint64_t lo = get_u32(in, offset);
  return hi << 32 | lo;
}

uint64_t get_u64(BytesView in, size_t& offset) {
  uint64_t hi = get_u32(in, offset);
  uint64_t lo = get_u32(in, offset);
  return hi << 32 | lo;
}

Bytes derive_bytes(uint64_t seed, const std::string& label, size_t n) {
  Bytes out;
  out.reserve(n);
  uint32_t block = 0;
  while (out.size() < n) {
    Bytes input;
    input.insert(input.end(), label.begin(), label.end());
    put_u64(input, seed);
    put_u32(input, block++);
    uint8_t digest[SHA256_DIGEST_LENGTH];
    SHA256(input.data(), input.size(), digest);
    size_t take = std::min<size_t>(n - out.size(), SHA256_DIGEST_LENGTH);
    out.insert(out.end(), digest, digest + take);
  }
  return out;
}

}  // namespace ranemu
