#include <doctest.h>

#include "ranemu/errors.hpp"
#include "ranemu/wire.hpp"
#include "test_helpers.hpp"
#include "vectors.hpp"

using namespace ranemu;
using namespace ranemu::wire;

TEST_CASE("gtpu minimal header") {
  Bytes pkt = encode_gtpu(0, {});
  CHECK(pkt.size() == 8);
  CHECK(pkt[2] == 0);
  CHECK(pkt[3] == 0);  // length field 0
}

TEST_CASE("gtpu 1024-byte payload gives 1032-byte packet") {
  std::mt19937_64 rng(1);
  Bytes payload = test::random_bytes(rng, 1024);
  CHECK(encode_gtpu(0xABCD, payload).size() == 1032);
}

TEST_CASE("gtpu roundtrip on random inputs") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10000; ++i) {
    uint32_t teid = static_cast<uint32_t>(rng());
    Bytes payload = test::random_bytes(rng, rng() % 512);
    GtpuPacket p = decode_gtpu(encode_gtpu(teid, payload));
    CHECK(p.teid == teid);
    CHECK(p.payload == payload);
  }
}

TEST_CASE("gtpu oversize payload rejected") {
  CHECK_THROWS_AS(encode_gtpu(1, Bytes(65536)), EncodingError);
  CHECK_NOTHROW(encode_gtpu(1, Bytes(65535)));
}

TEST_CASE("gtpu length-field mismatch") {
  // header claims 10 payload bytes but only 5 follow
  Bytes wire = encode_gtpu(7, test::hex("0102030405060708090a"));
  wire.resize(8 + 5);  // strip payload, keep length field 10
  CHECK_THROWS_AS(decode_gtpu(wire), MalformedPacket);
}

TEST_CASE("gtpu rejects every strict prefix") {
  Bytes wire = encode_gtpu(0xDEADBEEF, test::hex("00112233445566"));
  for (size_t n = 0; n < wire.size(); ++n)
    CHECK_THROWS_AS(decode_gtpu(BytesView(wire.data(), n)), MalformedPacket);
}

TEST_CASE("gtpu cross-validated against independent dissector encoding") {
  for (const auto& v : vectors::kGtpuReference) {
    Bytes payload = test::hex(v.payload_hex);
    Bytes expect = test::hex(v.wire_hex);
    CHECK(encode_gtpu(v.teid, payload) == expect);
    GtpuPacket p = decode_gtpu(expect);
    CHECK(p.teid == v.teid);
    CHECK(p.payload == payload);
  }
}

TEST_CASE("gtpu rejects non-G-PDU framing") {
  Bytes wire = encode_gtpu(7, test::hex("aabb"));
  Bytes bad_flags = wire;
  bad_flags[0] = 0x32;  // S flag set: optional fields would follow
  CHECK_THROWS_AS(decode_gtpu(bad_flags), MalformedPacket);
  Bytes bad_type = wire;
  bad_type[1] = 0x01;  // echo request
  CHECK_THROWS_AS(decode_gtpu(bad_type), MalformedPacket);
}

TEST_CASE("esp roundtrip under each suite") {
  std::mt19937_64 rng(3);
  for (const auto& suite : suite_catalog()) {
    if (!suite.is_esp()) continue;
    for (int i = 0; i < 2000; ++i) {
      EspPacket p;
      p.spi = static_cast<uint32_t>(rng());
      p.sequence = static_cast<uint32_t>(rng());
      p.iv = test::random_bytes(rng, suite.iv_len);
      p.ciphertext = test::random_bytes(rng, rng() % 256);
      p.icv = test::random_bytes(rng, suite.tag_len);
      CHECK(decode_esp(encode_esp(p), suite) == p);
    }
  }
}

TEST_CASE("esp gcm-128 overhead is 32 bytes plus ciphertext") {
  const auto& suite = suite_by_name("AES-GCM-128");
  EspPacket p;
  p.iv = Bytes(suite.iv_len);
  p.icv = Bytes(suite.tag_len);
  p.ciphertext = Bytes(100);
  CHECK(encode_esp(p).size() == 32 + 100);
}

TEST_CASE("esp empty ciphertext decodes") {
  const auto& suite = suite_by_name("AES-GCM-128");
  EspPacket p;
  p.spi = 9;
  p.sequence = 1;
  p.iv = Bytes(8, 0xAA);
  p.icv = Bytes(16, 0xBB);
  EspPacket q = decode_esp(encode_esp(p), suite);
  CHECK(q.ciphertext.empty());
  CHECK(q == p);
}

TEST_CASE("esp shorter than fixed fields rejected") {
  const auto& suite = suite_by_name("AES-GCM-128");
  Bytes tiny(8 + suite.iv_len + suite.tag_len - 1);
  CHECK_THROWS_AS(decode_esp(tiny, suite), MalformedPacket);
}

TEST_CASE("dtls record roundtrip") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10000; ++i) {
    DtlsRecord r;
    r.epoch = static_cast<uint16_t>(rng());
    r.sequence = rng() & 0xFFFFFFFFFFFFull;
    r.body = test::random_bytes(rng, 1 + rng() % 200);
    CHECK(decode_dtls_record(encode_dtls_record(r)) == r);
  }
}

TEST_CASE("dtls wrong version rejected") {
  DtlsRecord r;
  r.body = Bytes(10, 1);
  Bytes wire = encode_dtls_record(r);
  wire[1] = 0xFE;
  wire[2] = 0xFF;  // DTLS 1.0 code
  CHECK_THROWS_AS(decode_dtls_record(wire), UnsupportedVersion);
}

TEST_CASE("dtls 1024+16 byte body gives 1053-byte record") {
  DtlsRecord r;
  r.body = Bytes(1024 + 16, 7);
  CHECK(encode_dtls_record(r).size() == 1053);
}

TEST_CASE("dtls rejects strict prefixes") {
  DtlsRecord r;
  r.body = Bytes(32, 9);
  Bytes wire = encode_dtls_record(r);
  for (size_t n = 0; n < wire.size(); ++n)
    CHECK_THROWS(decode_dtls_record(BytesView(wire.data(), n)));
}

TEST_CASE("dtls empty application-data body rejected") {
  DtlsRecord r;
  CHECK_THROWS_AS(encode_dtls_record(r), EncodingError);
}

TEST_CASE("pdcp roundtrip with and without integrity") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10000; ++i) {
    PdcpPdu p;
    p.sn = static_cast<uint32_t>(rng()) % kPdcpSnModulus;
    p.payload = test::random_bytes(rng, rng() % 128);
    bool integrity = rng() % 2;
    if (integrity) {
      p.mac_i = static_cast<uint32_t>(rng());
      p.has_mac = true;
    }
    CHECK(decode_pdcp(encode_pdcp(p), integrity) == p);
  }
}

TEST_CASE("pdcp wire size without integrity is header + payload") {
  PdcpPdu p;
  p.sn = 3;
  p.payload = Bytes(50, 1);
  CHECK(encode_pdcp(p).size() == kPdcpHeaderLen + 50);
}

TEST_CASE("pdcp sn boundary") {
  PdcpPdu p;
  p.sn = kPdcpSnModulus;  // 2^18
  CHECK_THROWS_AS(encode_pdcp(p), InvalidArgument);
  p.sn = kPdcpSnModulus - 1;
  CHECK_NOTHROW(encode_pdcp(p));
}

TEST_CASE("pdcp truncation rejected") {
  PdcpPdu p;
  p.sn = 1;
  p.payload = Bytes(4, 2);
  p.mac_i = 77;
  p.has_mac = true;
  Bytes wire = encode_pdcp(p);
  // with integrity, anything below header+mac cannot parse
  for (size_t n = 0; n < kPdcpHeaderLen + kPdcpMacLen; ++n)
    CHECK_THROWS_AS(decode_pdcp(BytesView(wire.data(), n), true),
                    MalformedPacket);
}

TEST_CASE("wire overhead depends on format flags, never on content") {
  std::mt19937_64 rng(6);
  for (size_t len : {0u, 1u, 57u, 1024u}) {
    Bytes a = test::random_bytes(rng, len);
    Bytes b = test::random_bytes(rng, len);
    CHECK(encode_gtpu(1, a).size() == encode_gtpu(2, b).size());
    PdcpPdu pa{5, a, 0, false}, pb{9, b, 0, false};
    CHECK(encode_pdcp(pa).size() == encode_pdcp(pb).size());
    if (len > 0) {
      DtlsRecord ra, rb;
      ra.body = a;
      rb.body = b;
      CHECK(encode_dtls_record(ra).size() == encode_dtls_record(rb).size());
    }
  }
}

TEST_CASE("dump subcommand backends annotate fields") {
  Bytes gtpu = encode_gtpu(42, test::hex("010203"));
  std::string text = dump_gtpu(gtpu);
  CHECK(text.find("teid") != std::string::npos);
  CHECK(text.find("42") != std::string::npos);
}
