#include "ranemu/wire.hpp"

#include <iomanip>
#include <sstream>

#include "ranemu/errors.hpp"

namespace ranemu::wire {

Bytes encode_gtpu(uint32_t teid, BytesView payload) {
  if (payload.size() > kGtpuMaxPayload)
    throw EncodingError("GTP-U payload exceeds 65535 bytes");
  Bytes out;
  out.reserve(kGtpuHeaderLen + payload.size());
  put_u8(out, kGtpuFlags);
  put_u8(out, kGtpuMsgTypeGpdu);
  put_u16(out, static_cast<uint16_t>(payload.size()));
  put_u32(out, teid);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

GtpuPacket decode_gtpu(BytesView wire) {
  if (wire.size() < kGtpuHeaderLen)
    throw MalformedPacket("GTP-U packet shorter than mandatory header");
  size_t off = 0;
  uint8_t flags = get_u8(wire, off);
  uint8_t msg_type = get_u8(wire, off);
  uint16_t length = get_u16(wire, off);
  uint32_t teid = get_u32(wire, off);
  if (flags != kGtpuFlags)
    throw MalformedPacket("GTP-U flags not a plain v1 G-PDU header");
  if (msg_type != kGtpuMsgTypeGpdu)
    throw MalformedPacket("GTP-U message type is not G-PDU");
  if (length != wire.size() - kGtpuHeaderLen)
    throw MalformedPacket("GTP-U length field does not match payload length");
  return GtpuPacket{teid, Bytes(wire.begin() + off, wire.end())};
}

Bytes encode_esp(const EspPacket& packet) {
  Bytes out;
  out.reserve(8 + packet.iv.size() + packet.ciphertext.size() +
              packet.icv.size());
  put_u32(out, packet.spi);
  put_u32(out, packet.sequence);
  out.insert(out.end(), packet.iv.begin(), packet.iv.end());
  out.insert(out.end(), packet.ciphertext.begin(), packet.ciphertext.end());
  out.insert(out.end(), packet.icv.begin(), packet.icv.end());
  return out;
}

EspPacket decode_esp(BytesView wire, const SecuritySuite& suite) {
  if (!suite.is_esp()) throw InvalidArgument("suite is not an ESP suite");
  const size_t min_len = 8 + suite.iv_len + suite.tag_len;
  if (wire.size() < min_len)
    throw MalformedPacket("ESP packet shorter than SPI+seq+IV+ICV");
  size_t off = 0;
  EspPacket pkt;
  pkt.spi = get_u32(wire, off);
  pkt.sequence = get_u32(wire, off);
  pkt.iv.assign(wire.begin() + off, wire.begin() + off + suite.iv_len);
  off += suite.iv_len;
  const size_t ct_len = wire.size() - off - suite.tag_len;
  pkt.ciphertext.assign(wire.begin() + off, wire.begin() + off + ct_len);
  off += ct_len;
  pkt.icv.assign(wire.begin() + off, wire.end());
  return pkt;
}

Bytes encode_dtls_record(const DtlsRecord& record) {
  if (record.sequence >> 48)
    throw EncodingError("DTLS sequence exceeds 48 bits");
  if (record.content_type == kDtlsApplicationData && record.body.empty())
    throw EncodingError("application-data record with empty body");
  if (record.body.size() > 0xFFFF)
    throw EncodingError("DTLS record body exceeds 65535 bytes");
  Bytes out;
  out.reserve(kDtlsHeaderLen + record.body.size());
  put_u8(out, record.content_type);
  put_u16(out, record.version);
  put_u16(out, record.epoch);
  put_u48(out, record.sequence);
  put_u16(out, static_cast<uint16_t>(record.body.size()));
  out.insert(out.end(), record.body.begin(), record.body.end());
  return out;
}

DtlsRecord decode_dtls_record(BytesView wire) {
  if (wire.size() < kDtlsHeaderLen)
    throw MalformedPacket("DTLS record shorter than 13-byte header");
  size_t off = 0;
  DtlsRecord rec;
  rec.content_type = get_u8(wire, off);
  rec.version = get_u16(wire, off);
  if (rec.version != kDtls12Version)
    throw UnsupportedVersion("only DTLS 1.2 records are supported");
  rec.epoch = get_u16(wire, off);
  rec.sequence = get_u48(wire, off);
  uint16_t length = get_u16(wire, off);
  if (length != wire.size() - kDtlsHeaderLen)
    throw MalformedPacket("DTLS length field does not match body length");
  rec.body.assign(wire.begin() + off, wire.end());
  return rec;
}

Bytes encode_pdcp(const PdcpPdu& pdu) {
  if (pdu.sn >= kPdcpSnModulus)
    throw InvalidArgument("PDCP SN out of 18-bit range");
  Bytes out;
  out.reserve(kPdcpHeaderLen + pdu.payload.size() +
              (pdu.has_mac ? kPdcpMacLen : 0));
  put_u8(out, static_cast<uint8_t>(pdu.sn >> 16));
  put_u16(out, static_cast<uint16_t>(pdu.sn));
  out.insert(out.end(), pdu.payload.begin(), pdu.payload.end());
  if (pdu.has_mac) put_u32(out, pdu.mac_i);
  return out;
}

PdcpPdu decode_pdcp(BytesView wire, bool integrity_enabled) {
  const size_t min_len = kPdcpHeaderLen + (integrity_enabled ? kPdcpMacLen : 0);
  if (wire.size() < min_len) throw MalformedPacket("PDCP PDU truncated");
  size_t off = 0;
  PdcpPdu pdu;
  uint32_t hi = get_u8(wire, off);
  uint32_t lo = get_u16(wire, off);
  uint32_t sn = hi << 16 | lo;
  if (sn >= kPdcpSnModulus)
    throw MalformedPacket("PDCP header reserved bits set");
  pdu.sn = sn;
  size_t payload_len = wire.size() - min_len;
  pdu.payload.assign(wire.begin() + off, wire.begin() + off + payload_len);
  off += payload_len;
  if (integrity_enabled) {
    pdu.mac_i = get_u32(wire, off);
    pdu.has_mac = true;
  }
  return pdu;
}

namespace {

std::string hex_field(const std::string& label, BytesView data) {
  std::ostringstream os;
  os << "  " << std::left << std::setw(14) << label << to_hex(data) << "\n";
  return os.str();
}

std::string dec_field(const std::string& label, uint64_t v) {
  std::ostringstream os;
  os << "  " << std::left << std::setw(14) << label << v << "\n";
  return os.str();
}

}  // namespace

std::string dump_gtpu(BytesView wire) {
  GtpuPacket p = decode_gtpu(wire);
  std::ostringstream os;
  os << "GTP-U G-PDU (" << wire.size() << " bytes)\n";
  os << hex_field("flags", BytesView(wire.data(), 1));
  os << hex_field("msg_type", BytesView(wire.data() + 1, 1));
  os << dec_field("length", p.payload.size());
  os << dec_field("teid", p.teid);
  os << hex_field("payload", p.payload);
  return os.str();
}

std::string dump_esp(BytesView wire, const SecuritySuite& suite) {
  EspPacket p = decode_esp(wire, suite);
  std::ostringstream os;
  os << "ESP packet, suite " << suite.name << " (" << wire.size()
     << " bytes)\n";
  os << dec_field("spi", p.spi);
  os << dec_field("sequence", p.sequence);
  os << hex_field("iv", p.iv);
  os << hex_field("ciphertext", p.ciphertext);
  os << hex_field("icv", p.icv);
  return os.str();
}

std::string dump_dtls(BytesView wire) {
  DtlsRecord r = decode_dtls_record(wire);
  std::ostringstream os;
  os << "DTLS 1.2 record (" << wire.size() << " bytes)\n";
  os << dec_field("content_type", r.content_type);
  os << dec_field("epoch", r.epoch);
  os << dec_field("sequence", r.sequence);
  os << hex_field("body", r.body);
  return os.str();
}

std::string dump_pdcp(BytesView wire, bool integrity_enabled) {
  PdcpPdu p = decode_pdcp(wire, integrity_enabled);
  std::ostringstream os;
  os << "PDCP data PDU (" << wire.size() << " bytes)\n";
  os << dec_field("sn", p.sn);
  os << hex_field("payload", p.payload);
  if (p.has_mac) {
    Bytes mac;
    put_u32(mac, p.mac_i);
    os << hex_field("mac_i", mac);
  }
  return os.str();
}

}  // namespace ranemu::wire
