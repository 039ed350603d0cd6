#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "ranemu/bytes.hpp"
#include "ranemu/crypto.hpp"
#include "ranemu/suites.hpp"
#include "ranemu/wire.hpp"

namespace ranemu::links {

// Per-node tally of cryptographic work; exact and deterministic for a given
// scenario and packet count.
struct CryptoOpCounts {
  uint64_t pdcp_mac = 0;
  uint64_t pdcp_cipher = 0;
  uint64_t esp_protect = 0;
  uint64_t esp_unprotect = 0;
  uint64_t dtls_protect = 0;
  uint64_t dtls_unprotect = 0;

  uint64_t esp_total() const { return esp_protect + esp_unprotect; }
  uint64_t total() const {
    return pdcp_mac + pdcp_cipher + esp_total() + dtls_protect +
           dtls_unprotect;
  }
  CryptoOpCounts& operator+=(const CryptoOpCounts& o) {
    pdcp_mac += o.pdcp_mac;
    pdcp_cipher += o.pdcp_cipher;
    esp_protect += o.esp_protect;
    esp_unprotect += o.esp_unprotect;
    dtls_protect += o.dtls_protect;
    dtls_unprotect += o.dtls_unprotect;
    return *this;
  }
  bool operator==(const CryptoOpCounts&) const = default;
};

// 64-entry sliding anti-replay bitmap. A sequence number accepted once is
// never accepted again; anything at or below highest-64 is rejected.
class ReplayWindow {
 public:
  static constexpr uint64_t kSize = 64;

  // Pure check; does not change state.
  bool would_accept(uint64_t seq) const;
  // Marks seq as seen. Call only after authentication succeeded.
  void commit(uint64_t seq);

  uint64_t highest() const { return highest_; }

 private:
  uint64_t highest_ = 0;  // 0 = nothing received yet (valid seqs start at 1)
  uint64_t bitmap_ = 0;   // bit i = (highest_ - i) seen
};

struct SaKeys {
  Bytes enc_key;
  Bytes auth_key;  // HMAC key; empty for GCM/GMAC suites
  Bytes salt;      // 4 bytes for GCM/GMAC suites, else empty
};

enum class SaDirection { kProtect, kUnprotect };

// One direction of a pre-provisioned ESP tunnel.
class SecurityAssociation {
 public:
  SecurityAssociation(uint32_t spi, const SecuritySuite& suite, SaKeys keys,
                      SaDirection direction);

  Bytes protect(BytesView inner_packet);
  Bytes unprotect(BytesView wire);

  uint32_t spi() const { return spi_; }
  const SecuritySuite& suite() const { return *suite_; }
  SaDirection direction() const { return direction_; }
  uint64_t tx_sequence() const { return tx_sequence_; }
  const ReplayWindow& rx_window() const { return rx_window_; }
  const CryptoOpCounts& ops() const { return ops_; }
  void attach_counter(CryptoOpCounts* sink) { sink_ = sink; }

  // Jump the transmit counter forward (sequence-exhaustion testing).
  void fast_forward_tx(uint64_t next_minus_one);

 private:
  Bytes make_iv(uint32_t seq) const;

  uint32_t spi_;
  const SecuritySuite* suite_;
  SaKeys keys_;
  SaDirection direction_;
  uint64_t tx_sequence_ = 0;  // last sent; first packet goes out as 1
  ReplayWindow rx_window_;
  CryptoOpCounts ops_;
  CryptoOpCounts* sink_ = nullptr;
};

// Both ends of one protected link direction pair, sharing keys.
struct SaPair {
  SecurityAssociation protect_side;
  SecurityAssociation unprotect_side;
};

// Pre-provisions both endpoints: shared keys, zeroed counters, no handshake
// traffic. Throws InvalidArgument on key-length mismatch and ConfigError on
// SPI reuse within the provisioning session.
SaPair sa_provision(const SecuritySuite& suite, const SaKeys& keys,
                    uint32_t spi);
// Resets the session-wide SPI uniqueness set (one provisioning session per
// topology build).
void sa_reset_provisioning_session();

// ---------------------------------------------------------------- PDCP

struct PdcpConfig {
  uint8_t bearer = 1;
  Bytes integrity_key;   // 128-bit
  Bytes ciphering_key;   // 128-bit
  bool integrity_enabled = true;
  bool ciphering_enabled = true;  // requires integrity_enabled
};

// Uu bearer entity: MAC-then-encrypt with NIA2/NEA2, 18-bit SN, 32-bit
// COUNT continuing across SN wraps. In-order lossless delivery is an
// invariant of the in-process transport, so no reordering window exists.
class PdcpEntity {
 public:
  PdcpEntity(PdcpConfig config, uint8_t tx_direction);

  Bytes protect(BytesView sdu);
  Bytes unprotect(BytesView pdu);

  uint32_t tx_count() const { return tx_count_; }
  uint32_t rx_count() const { return rx_count_; }
  const PdcpConfig& config() const { return config_; }
  const CryptoOpCounts& ops() const { return ops_; }
  void attach_counter(CryptoOpCounts* sink) { sink_ = sink; }
  void fast_forward(uint32_t tx_count, uint32_t rx_count);

 private:
  PdcpConfig config_;
  uint8_t tx_direction_;  // 0 uplink, 1 downlink; rx uses the opposite
  uint32_t tx_count_ = 0;
  uint32_t rx_count_ = 0;
  CryptoOpCounts ops_;
  CryptoOpCounts* sink_ = nullptr;
};

// Entities for both ends of a Uu bearer (UE side transmits uplink).
std::pair<PdcpEntity, PdcpEntity> pdcp_provision(const PdcpConfig& config);

// ---------------------------------------------------------------- DTLS

struct DtlsKeys {
  Bytes key;   // AES-128
  Bytes salt;  // 4-byte implicit nonce part
};

// Record protection endpoint with pre-provisioned keys, epoch fixed at 0.
class DtlsEndpoint {
 public:
  DtlsEndpoint(DtlsKeys tx_keys, DtlsKeys rx_keys);

  Bytes protect(BytesView message);
  Bytes unprotect(BytesView wire);

  uint64_t tx_sequence() const { return tx_sequence_; }
  const CryptoOpCounts& ops() const { return ops_; }
  void attach_counter(CryptoOpCounts* sink) { sink_ = sink; }

 private:
  DtlsKeys tx_keys_;
  DtlsKeys rx_keys_;
  uint16_t epoch_ = 0;
  uint64_t tx_sequence_ = 0;
  ReplayWindow rx_window_;
  CryptoOpCounts ops_;
  CryptoOpCounts* sink_ = nullptr;
};

// Connected endpoint pair with mirrored key material.
std::pair<DtlsEndpoint, DtlsEndpoint> dtls_provision(const DtlsKeys& a_to_b,
                                                     const DtlsKeys& b_to_a);

}  // namespace ranemu::links
