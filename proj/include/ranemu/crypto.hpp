#pragma once

#include <cstdint>
#include <utility>

#include "ranemu/bytes.hpp"
#include "ranemu/suites.hpp"

namespace ranemu::crypto {

// ---------------------------------------------------------------- Uu (NIA2/NEA2)

// Per-packet inputs to the Uu algorithms. COUNT/BEARER/DIRECTION select the
// keystream / MAC instance; allocation of COUNT lives in the PDCP entity.
struct UuSecurityInputs {
  uint32_t count = 0;
  uint8_t bearer = 0;     // < 32
  uint8_t direction = 0;  // 0 uplink, 1 downlink
  Bytes key;              // 128-bit
};

// NEA2: AES-CTR keystream XOR. Involution: applying twice restores input.
Bytes nea2_crypt(const UuSecurityInputs& inputs, BytesView data);

// NIA2: leftmost 32 bits of AES-CMAC over COUNT||BEARER||DIRECTION||0^26||msg.
uint32_t nia2_mac(const UuSecurityInputs& inputs, BytesView message);

// ---------------------------------------------------------------- AEAD (GCM)

struct Sealed {
  Bytes ciphertext;
  Bytes tag;
};

// AES-GCM seal/open; nonce is the full 12-byte GCM nonce (salt||IV assembled
// by the caller). Throws AuthenticationFailure on any modification.
Sealed aead_seal(const SecuritySuite& suite, BytesView key, BytesView nonce,
                 BytesView aad, BytesView plaintext);
Bytes aead_open(const SecuritySuite& suite, BytesView key, BytesView nonce,
                BytesView aad, BytesView ciphertext, BytesView tag);

// ---------------------------------------------------------------- CBC + HMAC

struct Protected {
  Bytes ciphertext;
  Bytes icv;
};

// Encrypt-then-MAC per the ESP convention: the ICV covers header||iv||ct.
// `plaintext` must already carry the ESP trailer (see esp_pad).
Protected cbc_hmac_protect(const SecuritySuite& suite, BytesView enc_key,
                           BytesView auth_key, BytesView header, BytesView iv,
                           BytesView padded_plaintext);
// Verifies the ICV before any decryption; padding faults surface only after
// authentication succeeds.
Bytes cbc_hmac_unprotect(const SecuritySuite& suite, BytesView enc_key,
                         BytesView auth_key, BytesView header, BytesView iv,
                         BytesView ciphertext, BytesView icv);

// ---------------------------------------------------------------- GMAC

// Authentication-only: payload passes through in clear, 16-byte ICV covers
// header_aad||payload (GCM with empty plaintext).
Bytes gmac_protect(const SecuritySuite& suite, BytesView key, BytesView nonce,
                   BytesView payload, BytesView header_aad = {});
void gmac_verify(const SecuritySuite& suite, BytesView key, BytesView nonce,
                 BytesView payload, BytesView icv, BytesView header_aad = {});

// ---------------------------------------------------------------- ESP trailer

// RFC 4303 trailer: payload || pad(1,2,...) || pad_len || next_header, sized
// to the suite's alignment.
Bytes esp_pad(BytesView payload, size_t align);
Bytes esp_unpad(BytesView padded);  // throws PaddingError

// ---------------------------------------------------------------- helpers

Bytes hmac_sha256(BytesView key, BytesView message);
Bytes aes_cmac(BytesView key, BytesView message);
// Single-block AES-ECB encrypt, used to derive deterministic CBC IVs.
Bytes aes_encrypt_block(BytesView key, BytesView block16);

// True when the CPU advertises AES instructions (recorded by the benchmark).
bool aes_acceleration_active();

}  // namespace ranemu::crypto
