#pragma once

#include <random>

#include "ranemu/bytes.hpp"

namespace test {

inline ranemu::Bytes random_bytes(std::mt19937_64& rng, size_t n) {
  ranemu::Bytes out(n);
  for (auto& b : out) b = static_cast<uint8_t>(rng());
  return out;
}

inline ranemu::Bytes hex(const char* s) { return ranemu::from_hex(s); }

}  // namespace test
