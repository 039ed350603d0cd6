#include "ranemu/suites.hpp"

#include <sstream>

#include "ranemu/errors.hpp"

namespace ranemu {

size_t SecuritySuite::auth_key_len() const {
  switch (integrity) {
    case Integrity::kHmacSha256_128:
      return 32;
    case Integrity::kAesCmac32:
      return 16;
    case Integrity::kGcmBuiltin:
    case Integrity::kAesGmac128:
    case Integrity::kAesGmac256:
    case Integrity::kNone:
      return 0;  // integrity key folded into the cipher key / not used
  }
  return 0;
}

const std::vector<SecuritySuite>& suite_catalog() {
  static const std::vector<SecuritySuite> catalog = {
      {SuiteId::kEspCbc128HmacSha256, "AES-CBC-128+HMAC-SHA256-128",
       Cipher::kAesCbc128, Integrity::kHmacSha256_128, 128, 16, 16},
      {SuiteId::kEspCbc256HmacSha256, "AES-CBC-256+HMAC-SHA256-128",
       Cipher::kAesCbc256, Integrity::kHmacSha256_128, 256, 16, 16},
      {SuiteId::kEspGcm128, "AES-GCM-128", Cipher::kAesGcm128,
       Integrity::kGcmBuiltin, 128, 8, 16},
      {SuiteId::kEspGcm256, "AES-GCM-256", Cipher::kAesGcm256,
       Integrity::kGcmBuiltin, 256, 8, 16},
      {SuiteId::kEspNullGmac128, "NULL+AES-GMAC-128", Cipher::kNull,
       Integrity::kAesGmac128, 128, 8, 16},
      {SuiteId::kEspNullGmac256, "NULL+AES-GMAC-256", Cipher::kNull,
       Integrity::kAesGmac256, 256, 8, 16},
      // DTLS 1.2 nonce is built from epoch||sequence, so no on-wire IV field.
      {SuiteId::kDtlsGcm128, "DTLS-1.2-AES-GCM-128", Cipher::kAesGcm128,
       Integrity::kGcmBuiltin, 128, 0, 16},
      // Uu: NEA2 keystream + NIA2 32-bit MAC, IV derived from COUNT/BEARER.
      {SuiteId::kUuNia2Nea2, "NIA2-NEA2", Cipher::kAesCtr128,
       Integrity::kAesCmac32, 128, 0, 4},
  };
  return catalog;
}

const SecuritySuite& suite_by_id(SuiteId id) {
  for (const auto& s : suite_catalog()) {
    if (s.id == id) return s;
  }
  throw InvalidArgument("unknown suite id");
}

const SecuritySuite& suite_by_name(const std::string& name) {
  for (const auto& s : suite_catalog()) {
    if (s.name == name) return s;
  }
  std::ostringstream msg;
  msg << "unknown suite '" << name << "'; known suites:";
  for (const auto& s : suite_catalog()) msg << " " << s.name;
  throw InvalidArgument(msg.str());
}

std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& s : suite_catalog()) names.push_back(s.name);
  return names;
}

}  // namespace ranemu
