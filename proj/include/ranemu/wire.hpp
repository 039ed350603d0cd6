#pragma once

#include <cstdint>

#include "ranemu/bytes.hpp"
#include "ranemu/suites.hpp"

namespace ranemu::wire {

// ---------------------------------------------------------------- GTP-U
// Minimal G-PDU framing: 8-byte mandatory header (flags 0x30, message type
// 0xff, 16-bit payload length, 32-bit TEID), no optional fields.

inline constexpr size_t kGtpuHeaderLen = 8;
inline constexpr uint8_t kGtpuFlags = 0x30;   // version 1, PT=1, no E/S/PN
inline constexpr uint8_t kGtpuMsgTypeGpdu = 0xFF;
inline constexpr size_t kGtpuMaxPayload = 65535;

struct GtpuPacket {
  uint32_t teid = 0;
  Bytes payload;

  bool operator==(const GtpuPacket&) const = default;
};

Bytes encode_gtpu(uint32_t teid, BytesView payload);
GtpuPacket decode_gtpu(BytesView wire);

// ---------------------------------------------------------------- ESP
// SPI || sequence || IV || ciphertext || ICV. IV and ICV lengths come from
// the suite; there is no length field, datagram boundaries delimit packets.

struct EspPacket {
  uint32_t spi = 0;
  uint32_t sequence = 0;
  Bytes iv;
  Bytes ciphertext;
  Bytes icv;

  bool operator==(const EspPacket&) const = default;
};

Bytes encode_esp(const EspPacket& packet);
EspPacket decode_esp(BytesView wire, const SecuritySuite& suite);

// ---------------------------------------------------------------- DTLS 1.2
// Record layer only; version pinned to {254, 253}.

inline constexpr size_t kDtlsHeaderLen = 13;
inline constexpr uint16_t kDtls12Version = 0xFEFD;
inline constexpr uint8_t kDtlsApplicationData = 23;

struct DtlsRecord {
  uint8_t content_type = kDtlsApplicationData;
  uint16_t version = kDtls12Version;
  uint16_t epoch = 0;
  uint64_t sequence = 0;  // 48-bit
  Bytes body;             // ciphertext including AEAD tag

  bool operator==(const DtlsRecord&) const = default;
};

Bytes encode_dtls_record(const DtlsRecord& record);
DtlsRecord decode_dtls_record(BytesView wire);

// ---------------------------------------------------------------- PDCP
// Simplified data PDU: 3-byte big-endian SN carrier (18-bit SN, upper six
// bits zero), payload, then a 4-byte MAC-I when integrity is enabled.

inline constexpr size_t kPdcpHeaderLen = 3;
inline constexpr uint32_t kPdcpSnModulus = 1u << 18;
inline constexpr size_t kPdcpMacLen = 4;

struct PdcpPdu {
  uint32_t sn = 0;       // < 2^18
  Bytes payload;
  uint32_t mac_i = 0;    // meaningful only when integrity is enabled
  bool has_mac = false;

  bool operator==(const PdcpPdu&) const = default;
};

Bytes encode_pdcp(const PdcpPdu& pdu);
PdcpPdu decode_pdcp(BytesView wire, bool integrity_enabled);

// Annotated hex dump of any encoded PDU, for the CLI `dump` subcommand.
std::string dump_gtpu(BytesView wire);
std::string dump_esp(BytesView wire, const SecuritySuite& suite);
std::string dump_dtls(BytesView wire);
std::string dump_pdcp(BytesView wire, bool integrity_enabled);

}  // namespace ranemu::wire
