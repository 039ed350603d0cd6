#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ranemu {

enum class Cipher {
  kAesCtr128,
  kAesCbc128,
  kAesCbc256,
  kAesGcm128,
  kAesGcm256,
  kNull,
};

enum class Integrity {
  kAesCmac32,       // NIA2, 32-bit tag
  kHmacSha256_128,  // HMAC-SHA-256 truncated to 128 bits
  kGcmBuiltin,
  kAesGmac128,
  kAesGmac256,
  kNone,
};

enum class SuiteId {
  kEspCbc128HmacSha256,
  kEspCbc256HmacSha256,
  kEspGcm128,
  kEspGcm256,
  kEspNullGmac128,
  kEspNullGmac256,
  kDtlsGcm128,
  kUuNia2Nea2,
};

// One concrete protection configuration: cipher, integrity, key and
// on-wire IV/tag geometry.
struct SecuritySuite {
  SuiteId id;
  std::string name;    // exact vocabulary for config files and CLI flags
  Cipher cipher;
  Integrity integrity;
  size_t key_bits;     // cipher key size (integrity key sized separately)
  size_t iv_len;       // on-wire IV bytes (0 when derived from header fields)
  size_t tag_len;      // ICV / MAC bytes

  bool is_esp() const { return id <= SuiteId::kEspNullGmac256; }
  bool is_gcm_family() const {
    return integrity == Integrity::kGcmBuiltin ||
           integrity == Integrity::kAesGmac128 ||
           integrity == Integrity::kAesGmac256;
  }
  size_t enc_key_len() const { return key_bits / 8; }
  // HMAC-SHA-256 keys are 256-bit; CMAC and GMAC reuse a 128/256-bit AES key.
  size_t auth_key_len() const;
  // GCM/GMAC salt bytes carried in the SA key material (RFC 4106/4543 style).
  size_t salt_len() const { return is_gcm_family() ? 4 : 0; }
  // Plaintext alignment for the ESP trailer: cipher block for CBC, 4 otherwise.
  size_t esp_pad_align() const {
    return (cipher == Cipher::kAesCbc128 || cipher == Cipher::kAesCbc256) ? 16
                                                                          : 4;
  }
};

// The six mandatory-to-support ESP configurations, the DTLS 1.2 record
// protection, and the Uu NIA2/NEA2 pair.
const std::vector<SecuritySuite>& suite_catalog();

const SecuritySuite& suite_by_id(SuiteId id);
const SecuritySuite& suite_by_name(const std::string& name);  // throws InvalidArgument
std::vector<std::string> suite_names();

}  // namespace ranemu
