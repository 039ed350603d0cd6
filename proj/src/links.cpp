#include "ranemu/links.hpp"

#include <mutex>
#include <unordered_set>

#include "ranemu/errors.hpp"

namespace ranemu::links {

bool ReplayWindow::would_accept(uint64_t seq) const {
  if (seq == 0) return false;
  if (seq > highest_) return true;
  uint64_t age = highest_ - seq;
  if (age >= kSize) return false;
  return (bitmap_ & (1ull << age)) == 0;
}

void ReplayWindow::commit(uint64_t seq) {
  if (seq > highest_) {
    uint64_t shift = seq - highest_;
    bitmap_ = shift >= kSize ? 0 : bitmap_ << shift;
    bitmap_ |= 1;
    highest_ = seq;
  } else {
    bitmap_ |= 1ull << (highest_ - seq);
  }
}

namespace {

void check_sa_keys(const SecuritySuite& suite, const SaKeys& keys) {
  if (keys.enc_key.size() != suite.enc_key_len())
    throw InvalidArgument("encryption key length does not match suite " +
                          suite.name);
  if (keys.auth_key.size() != suite.auth_key_len())
    throw InvalidArgument("authentication key length does not match suite " +
                          suite.name);
  if (keys.salt.size() != suite.salt_len())
    throw InvalidArgument("salt length does not match suite " + suite.name);
}

std::mutex g_spi_mutex;
std::unordered_set<uint32_t> g_provisioned_spis;

}  // namespace

SecurityAssociation::SecurityAssociation(uint32_t spi,
                                         const SecuritySuite& suite,
                                         SaKeys keys, SaDirection direction)
    : spi_(spi), suite_(&suite), keys_(std::move(keys)), direction_(direction) {
  if (!suite.is_esp()) throw InvalidArgument("SA requires an ESP suite");
  check_sa_keys(suite, keys_);
}

Bytes SecurityAssociation::make_iv(uint32_t seq) const {
  if (suite_->iv_len == 8) {
    // GCM/GMAC: unique-per-key counter IV
    Bytes iv;
    put_u64(iv, seq);
    return iv;
  }
  // CBC: unpredictable yet reproducible IV, the encrypted block counter
  Bytes block;
  put_u32(block, spi_);
  put_u32(block, seq);
  put_u64(block, 0);
  return crypto::aes_encrypt_block(keys_.enc_key, block);
}

Bytes SecurityAssociation::protect(BytesView inner_packet) {
  if (direction_ != SaDirection::kProtect)
    throw InvalidArgument("protect called on unprotect-side SA");
  if (tx_sequence_ >= 0xFFFFFFFFull)
    throw SequenceExhausted("ESP sequence space exhausted; re-provision");
  uint32_t seq = static_cast<uint32_t>(++tx_sequence_);

  wire::EspPacket pkt;
  pkt.spi = spi_;
  pkt.sequence = seq;
  pkt.iv = make_iv(seq);
  Bytes header;
  put_u32(header, spi_);
  put_u32(header, seq);

  Bytes padded = crypto::esp_pad(inner_packet, suite_->esp_pad_align());
  switch (suite_->cipher) {
    case Cipher::kAesGcm128:
    case Cipher::kAesGcm256: {
      Bytes nonce = BytesView(keys_.salt) + pkt.iv;
      auto sealed = crypto::aead_seal(*suite_, keys_.enc_key, nonce, header,
                                      padded);
      pkt.ciphertext = std::move(sealed.ciphertext);
      pkt.icv = std::move(sealed.tag);
      break;
    }
    case Cipher::kNull: {
      Bytes nonce = BytesView(keys_.salt) + pkt.iv;
      pkt.icv = crypto::gmac_protect(*suite_, keys_.enc_key, nonce, padded,
                                     header);
      pkt.ciphertext = std::move(padded);
      break;
    }
    case Cipher::kAesCbc128:
    case Cipher::kAesCbc256: {
      auto prot = crypto::cbc_hmac_protect(*suite_, keys_.enc_key,
                                           keys_.auth_key, header, pkt.iv,
                                           padded);
      pkt.ciphertext = std::move(prot.ciphertext);
      pkt.icv = std::move(prot.icv);
      break;
    }
    default:
      throw InvalidArgument("cipher not valid for ESP");
  }
  ops_.esp_protect++;
  if (sink_) sink_->esp_protect++;
  return wire::encode_esp(pkt);
}

Bytes SecurityAssociation::unprotect(BytesView wire_bytes) {
  if (direction_ != SaDirection::kUnprotect)
    throw InvalidArgument("unprotect called on protect-side SA");
  wire::EspPacket pkt = wire::decode_esp(wire_bytes, *suite_);
  if (pkt.spi != spi_) throw UnknownSpi("no SA provisioned for SPI");
  if (!rx_window_.would_accept(pkt.sequence))
    throw ReplayRejected("ESP sequence replayed or older than window");

  Bytes header;
  put_u32(header, pkt.spi);
  put_u32(header, pkt.sequence);

  Bytes padded;
  switch (suite_->cipher) {
    case Cipher::kAesGcm128:
    case Cipher::kAesGcm256: {
      Bytes nonce = BytesView(keys_.salt) + pkt.iv;
      padded = crypto::aead_open(*suite_, keys_.enc_key, nonce, header,
                                 pkt.ciphertext, pkt.icv);
      break;
    }
    case Cipher::kNull: {
      Bytes nonce = BytesView(keys_.salt) + pkt.iv;
      crypto::gmac_verify(*suite_, keys_.enc_key, nonce, pkt.ciphertext,
                          pkt.icv, header);
      padded = std::move(pkt.ciphertext);
      break;
    }
    case Cipher::kAesCbc128:
    case Cipher::kAesCbc256: {
      padded = crypto::cbc_hmac_unprotect(*suite_, keys_.enc_key,
                                          keys_.auth_key, header, pkt.iv,
                                          pkt.ciphertext, pkt.icv);
      break;
    }
    default:
      throw InvalidArgument("cipher not valid for ESP");
  }
  // Authentication succeeded: only now may state advance.
  rx_window_.commit(pkt.sequence);
  ops_.esp_unprotect++;
  if (sink_) sink_->esp_unprotect++;
  return crypto::esp_unpad(padded);
}

void SecurityAssociation::fast_forward_tx(uint64_t next_minus_one) {
  if (next_minus_one < tx_sequence_)
    throw InvalidArgument("tx sequence may only move forward");
  tx_sequence_ = next_minus_one;
}

SaPair sa_provision(const SecuritySuite& suite, const SaKeys& keys,
                    uint32_t spi) {
  if (spi == 0) throw InvalidArgument("SPI 0 is reserved");
  check_sa_keys(suite, keys);
  {
    std::lock_guard lock(g_spi_mutex);
    if (!g_provisioned_spis.insert(spi).second)
      throw ConfigError("SPI already provisioned in this session");
  }
  return SaPair{SecurityAssociation(spi, suite, keys, SaDirection::kProtect),
                SecurityAssociation(spi, suite, keys, SaDirection::kUnprotect)};
}

void sa_reset_provisioning_session() {
  std::lock_guard lock(g_spi_mutex);
  g_provisioned_spis.clear();
}

// ---------------------------------------------------------------- PDCP

PdcpEntity::PdcpEntity(PdcpConfig config, uint8_t tx_direction)
    : config_(std::move(config)), tx_direction_(tx_direction) {
  if (config_.bearer >= 32) throw InvalidArgument("bearer must be < 32");
  if (config_.ciphering_enabled && !config_.integrity_enabled)
    throw InvalidArgument("ciphering requires integrity on the Uu bearer");
  if (config_.integrity_enabled && config_.integrity_key.size() != 16)
    throw InvalidArgument("integrity key must be 128 bits");
  if (config_.ciphering_enabled && config_.ciphering_key.size() != 16)
    throw InvalidArgument("ciphering key must be 128 bits");
}

Bytes PdcpEntity::protect(BytesView sdu) {
  if (tx_count_ == 0xFFFFFFFFu)
    throw SequenceExhausted("PDCP COUNT exhausted; re-key required");
  uint32_t count = tx_count_++;

  wire::PdcpPdu pdu;
  pdu.sn = count % wire::kPdcpSnModulus;

  Bytes body(sdu.begin(), sdu.end());
  if (config_.integrity_enabled) {
    crypto::UuSecurityInputs mac_in{count, config_.bearer, tx_direction_,
                                    config_.integrity_key};
    uint32_t mac = crypto::nia2_mac(mac_in, body);
    put_u32(body, mac);  // MAC first, then cipher over payload||MAC
    ops_.pdcp_mac++;
    if (sink_) sink_->pdcp_mac++;
  }
  if (config_.ciphering_enabled) {
    crypto::UuSecurityInputs enc_in{count, config_.bearer, tx_direction_,
                                    config_.ciphering_key};
    body = crypto::nea2_crypt(enc_in, body);
    ops_.pdcp_cipher++;
    if (sink_) sink_->pdcp_cipher++;
  }
  if (config_.integrity_enabled) {
    size_t mac_off = body.size() - wire::kPdcpMacLen;
    pdu.payload.assign(body.begin(), body.begin() + mac_off);
    pdu.mac_i = get_u32(body, mac_off);
    pdu.has_mac = true;
  } else {
    pdu.payload = std::move(body);
  }
  return wire::encode_pdcp(pdu);
}

Bytes PdcpEntity::unprotect(BytesView pdu_bytes) {
  wire::PdcpPdu pdu = wire::decode_pdcp(pdu_bytes, config_.integrity_enabled);
  if (rx_count_ == 0xFFFFFFFFu)
    throw SequenceExhausted("PDCP COUNT exhausted; re-key required");
  uint32_t count = rx_count_;
  if (pdu.sn != count % wire::kPdcpSnModulus)
    throw MalformedPacket("PDCP SN does not match expected in-order COUNT");
  uint8_t rx_direction = tx_direction_ ^ 1;

  Bytes body = std::move(pdu.payload);
  if (pdu.has_mac) put_u32(body, pdu.mac_i);
  if (config_.ciphering_enabled) {
    crypto::UuSecurityInputs enc_in{count, config_.bearer, rx_direction,
                                    config_.ciphering_key};
    body = crypto::nea2_crypt(enc_in, body);
  }
  if (config_.integrity_enabled) {
    Bytes sdu(body.begin(), body.end() - wire::kPdcpMacLen);
    size_t off = body.size() - wire::kPdcpMacLen;
    uint32_t wire_mac = get_u32(body, off);
    crypto::UuSecurityInputs mac_in{count, config_.bearer, rx_direction,
                                    config_.integrity_key};
    uint32_t expect = crypto::nia2_mac(mac_in, sdu);
    if (expect != wire_mac)
      throw AuthenticationFailure("PDCP MAC-I verification failed");
    // Verified: only now may counters and accounting advance.
    rx_count_++;
    ops_.pdcp_mac++;
    if (sink_) sink_->pdcp_mac++;
    if (config_.ciphering_enabled) {
      ops_.pdcp_cipher++;
      if (sink_) sink_->pdcp_cipher++;
    }
    return sdu;
  }
  rx_count_++;
  if (config_.ciphering_enabled) {
    ops_.pdcp_cipher++;
    if (sink_) sink_->pdcp_cipher++;
  }
  return body;
}

void PdcpEntity::fast_forward(uint32_t tx_count, uint32_t rx_count) {
  if (tx_count < tx_count_ || rx_count < rx_count_)
    throw InvalidArgument("PDCP counts may only move forward");
  tx_count_ = tx_count;
  rx_count_ = rx_count;
}

std::pair<PdcpEntity, PdcpEntity> pdcp_provision(const PdcpConfig& config) {
  return {PdcpEntity(config, 0), PdcpEntity(config, 1)};
}

// ---------------------------------------------------------------- DTLS

namespace {
void check_dtls_keys(const DtlsKeys& keys) {
  if (keys.key.size() != 16)
    throw InvalidArgument("DTLS-1.2-AES-GCM-128 key must be 128 bits");
  if (keys.salt.size() != 4)
    throw InvalidArgument("DTLS implicit nonce salt must be 4 bytes");
}

// RFC 5246/6347 additional data: epoch||seq48||type||version||length
Bytes dtls_aad(const wire::DtlsRecord& rec, size_t plaintext_len) {
  Bytes aad;
  put_u16(aad, rec.epoch);
  put_u48(aad, rec.sequence);
  put_u8(aad, rec.content_type);
  put_u16(aad, rec.version);
  put_u16(aad, static_cast<uint16_t>(plaintext_len));
  return aad;
}

Bytes dtls_nonce(const DtlsKeys& keys, uint16_t epoch, uint64_t seq) {
  Bytes nonce(keys.salt.begin(), keys.salt.end());
  put_u16(nonce, epoch);
  put_u48(nonce, seq);
  return nonce;
}
}  // namespace

DtlsEndpoint::DtlsEndpoint(DtlsKeys tx_keys, DtlsKeys rx_keys)
    : tx_keys_(std::move(tx_keys)), rx_keys_(std::move(rx_keys)) {
  check_dtls_keys(tx_keys_);
  check_dtls_keys(rx_keys_);
}

Bytes DtlsEndpoint::protect(BytesView message) {
  if (tx_sequence_ >= (1ull << 48) - 1)
    throw SequenceExhausted("DTLS record sequence space exhausted");
  wire::DtlsRecord rec;
  rec.epoch = epoch_;
  rec.sequence = ++tx_sequence_;
  const auto& suite = suite_by_id(SuiteId::kDtlsGcm128);
  auto sealed = crypto::aead_seal(
      suite, tx_keys_.key, dtls_nonce(tx_keys_, rec.epoch, rec.sequence),
      dtls_aad(rec, message.size()), message);
  rec.body = std::move(sealed.ciphertext);
  rec.body.insert(rec.body.end(), sealed.tag.begin(), sealed.tag.end());
  ops_.dtls_protect++;
  if (sink_) sink_->dtls_protect++;
  return wire::encode_dtls_record(rec);
}

Bytes DtlsEndpoint::unprotect(BytesView wire_bytes) {
  wire::DtlsRecord rec = wire::decode_dtls_record(wire_bytes);
  if (rec.epoch != epoch_)
    throw MalformedPacket("record epoch not provisioned");
  const auto& suite = suite_by_id(SuiteId::kDtlsGcm128);
  if (rec.body.size() < suite.tag_len)
    throw MalformedPacket("DTLS record body shorter than AEAD tag");
  if (!rx_window_.would_accept(rec.sequence))
    throw ReplayRejected("DTLS record sequence replayed or too old");
  BytesView body(rec.body);
  BytesView ct = body.subspan(0, body.size() - suite.tag_len);
  BytesView tag = body.subspan(body.size() - suite.tag_len);
  Bytes plain = crypto::aead_open(
      suite, rx_keys_.key, dtls_nonce(rx_keys_, rec.epoch, rec.sequence),
      dtls_aad(rec, ct.size()), ct, tag);
  rx_window_.commit(rec.sequence);
  ops_.dtls_unprotect++;
  if (sink_) sink_->dtls_unprotect++;
  return plain;
}

std::pair<DtlsEndpoint, DtlsEndpoint> dtls_provision(const DtlsKeys& a_to_b,
                                                     const DtlsKeys& b_to_a) {
  return {DtlsEndpoint(a_to_b, b_to_a), DtlsEndpoint(b_to_a, a_to_b)};
}

}  // namespace ranemu::links
