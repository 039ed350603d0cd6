#include <doctest.h>

#include <set>

#include "ranemu/errors.hpp"
#include "ranemu/measure.hpp"
#include "ranemu/procedures.hpp"
#include "ranemu/topology.hpp"
#include "test_helpers.hpp"

using namespace ranemu;
using namespace ranemu::procedures;
using scenario::Interface;

namespace {

scenario::ScenarioConfig cp_config(const std::string& extra) {
  return scenario::build_config(
      scenario::parse_scenario_text(
          "schema_version = 1\nmode = disaggregated\n"
          "experiment = cp-procedures\nwarmup = 0\n" +
          extra),
      {}, {});
}

}  // namespace

TEST_CASE("procedure message TLV roundtrip") {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 5000; ++i) {
    ProcedureMessage msg{};
    msg.procedure = rng() % 2 ? ProcedureKind::kUeContextSetup
                              : ProcedureKind::kBearerContextSetup;
    msg.kind = rng() % 2 ? MessageKind::kRequest : MessageKind::kResponse;
    msg.transaction_id = static_cast<uint32_t>(rng());
    msg.ue_id = static_cast<uint32_t>(rng());
    if (rng() % 2) msg.f1u_teid = static_cast<uint32_t>(rng());
    if (rng() % 2) msg.n3_teid = static_cast<uint32_t>(rng());
    CHECK(decode_message(encode_message(msg)) == msg);
  }
}

TEST_CASE("procedure message rejects malformed input") {
  ProcedureMessage msg{ProcedureKind::kUeContextSetup, MessageKind::kRequest,
                       1, 2, {}, {}};
  Bytes wire = encode_message(msg);
  for (size_t n = 0; n < wire.size(); ++n)
    CHECK_THROWS_AS(decode_message(BytesView(wire.data(), n)),
                    MalformedPacket);
  Bytes bad = wire;
  bad[0] = 9;  // unknown procedure
  CHECK_THROWS_AS(decode_message(bad), MalformedPacket);
}

TEST_CASE("ue context setup on a plain link") {
  auto pipeline = topology::build_topology(cp_config(""));
  ControlPlaneAgent agent(*pipeline, 1);
  auto transcript = agent.run_ue_context_setup();
  CHECK(transcript.duration.count() > 0);
  CHECK(transcript.entries.size() == 2);
  CHECK(transcript.entries[0].direction == "CU-CP->DU");
  CHECK(transcript.entries[1].direction == "DU->CU-CP");
  CHECK(agent.du_contexts().size() == 1);
  // exportable text form: one line per message plus the duration line
  auto text = transcript.to_text();
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}

TEST_CASE("dtls transcripts exceed plain wire lengths by exactly 29 bytes") {
  auto plain_pipe = topology::build_topology(cp_config(""));
  ControlPlaneAgent plain_agent(*plain_pipe, 1);
  auto plain = plain_agent.run_ue_context_setup();

  auto dtls_pipe = topology::build_topology(
      cp_config("link.f1c.suite = DTLS-1.2-AES-GCM-128\n"));
  ControlPlaneAgent dtls_agent(*dtls_pipe, 1);
  auto dtls = dtls_agent.run_ue_context_setup();

  REQUIRE(plain.entries.size() == dtls.entries.size());
  for (size_t i = 0; i < plain.entries.size(); ++i)
    CHECK(dtls.entries[i].wire_length ==
          plain.entries[i].wire_length + 13 + 16);
}

TEST_CASE("bearer context setup allocates distinct nonzero teids") {
  auto pipeline = topology::build_topology(cp_config(""));
  ControlPlaneAgent agent(*pipeline, 7);
  auto t1 = agent.run_bearer_context_setup();
  auto t2 = agent.run_bearer_context_setup();
  std::set<uint32_t> teids{*t1.response.f1u_teid, *t1.response.n3_teid,
                           *t2.response.f1u_teid, *t2.response.n3_teid};
  CHECK(teids.size() == 4);  // pairwise distinct
  for (uint32_t teid : teids) CHECK(teid != 0);
  CHECK(agent.cuup_contexts().size() == 2);
}

TEST_CASE("teid allocation is injective across a long session") {
  auto pipeline = topology::build_topology(cp_config(""));
  ControlPlaneAgent agent(*pipeline, 9);
  std::set<uint32_t> seen;
  for (int i = 0; i < 200; ++i) {
    auto t = agent.run_bearer_context_setup();
    CHECK(seen.insert(*t.response.f1u_teid).second);
    CHECK(seen.insert(*t.response.n3_teid).second);
  }
}

TEST_CASE("bearer setup teids wire into a working user plane") {
  auto cfg = cp_config(
      "link.uu.suite = NIA2-NEA2\n"
      "link.f1u.suite = AES-GCM-128\n"
      "link.n3.suite = AES-GCM-128\n"
      "link.e1.suite = AES-GCM-128\n");
  auto pipeline = topology::build_topology(cfg);
  ControlPlaneAgent agent(*pipeline, 3);
  auto transcript = agent.run_bearer_context_setup();
  pipeline->install_tunnel_ids(topology::TunnelIds{
      *transcript.response.f1u_teid, *transcript.response.n3_teid});
  std::mt19937_64 rng(52);
  for (int i = 0; i < 100; ++i) {
    Bytes payload = test::random_bytes(rng, 1024);
    CHECK_NOTHROW(pipeline->send_echo(payload));
  }
}

TEST_CASE("registration sequence returns both transcripts in order") {
  auto pipeline = topology::build_topology(cp_config(""));
  ControlPlaneAgent agent(*pipeline, 4);
  auto reg = agent.run_registration_sequence();
  CHECK(reg.ue_context_setup.procedure == ProcedureKind::kUeContextSetup);
  CHECK(reg.bearer_context_setup.procedure ==
        ProcedureKind::kBearerContextSetup);
  CHECK(reg.ue_context_setup.duration.count() > 0);
  CHECK(reg.bearer_context_setup.duration.count() > 0);
}

TEST_CASE("registration sequence repeated gives one sample per run") {
  auto pipeline = topology::build_topology(cp_config(""));
  ControlPlaneAgent agent(*pipeline, 5);
  std::vector<double> ue_samples, bearer_samples;
  for (int i = 0; i < 1000; ++i) {
    auto reg = agent.run_registration_sequence();
    ue_samples.push_back(static_cast<double>(reg.ue_context_setup.duration.count()));
    bearer_samples.push_back(
        static_cast<double>(reg.bearer_context_setup.duration.count()));
  }
  CHECK(ue_samples.size() == 1000);
  CHECK(bearer_samples.size() == 1000);
}

TEST_CASE("registration sequence composes over secured links") {
  auto cfg = cp_config(
      "link.f1c.suite = AES-GCM-128\n"
      "link.e1.suite = AES-CBC-128+HMAC-SHA256-128\n");
  auto pipeline = topology::build_topology(cfg);
  ControlPlaneAgent agent(*pipeline, 6);
  auto reg = agent.run_registration_sequence();
  // ESP-framed wire lengths exceed the plain TLV length
  auto plain_pipe = topology::build_topology(cp_config(""));
  ControlPlaneAgent plain_agent(*plain_pipe, 6);
  auto plain = plain_agent.run_registration_sequence();
  CHECK(reg.ue_context_setup.entries[0].wire_length >
        plain.ue_context_setup.entries[0].wire_length);
  CHECK(reg.bearer_context_setup.entries[0].wire_length >
        plain.bearer_context_setup.entries[0].wire_length);
}

TEST_CASE("tampered request on an ESP link: failure, no context allocated") {
  auto cfg = cp_config("link.e1.suite = AES-GCM-128\n");
  auto pipeline = topology::build_topology(cfg);
  ControlPlaneAgent agent(*pipeline, 8);
  pipeline->tamper_next(Interface::kE1, 1);
  CHECK_THROWS_AS(agent.run_bearer_context_setup(), Error);
  CHECK(agent.cuup_contexts().empty());
  // recovery: next run succeeds and allocates exactly one context
  CHECK_NOTHROW(agent.run_bearer_context_setup());
  CHECK(agent.cuup_contexts().size() == 1);
}

TEST_CASE("duplicate response is ignored") {
  // On a DTLS link a duplicated record is replay-rejected and dropped; the
  // procedure completes from the first copy.
  auto cfg = cp_config("link.e1.suite = DTLS-1.2-AES-GCM-128\n");
  auto pipeline = topology::build_topology(cfg);
  ControlPlaneAgent agent(*pipeline, 10);
  auto t = agent.run_bearer_context_setup();
  CHECK(t.entries.size() == 2);

  // Raw duplicate injection at channel level: the second delivery of the
  // same protected record must be rejected, not re-processed.
  auto& cucp = pipeline->cp_channel(Interface::kE1, 0);
  auto& cuup = pipeline->cp_channel(Interface::kE1, 1);
  ProcedureMessage msg{ProcedureKind::kBearerContextSetup,
                       MessageKind::kResponse, 0xAA, 1, 0x10, 0x20};
  cucp.send(encode_message(msg));
  auto first = cuup.recv(std::chrono::milliseconds(100));
  CHECK(first.has_value());
}

TEST_CASE("tampered F1-C request surfaces as an authentication failure") {
  auto cfg = cp_config("link.f1c.suite = AES-GCM-128\n");
  auto pipeline = topology::build_topology(cfg);
  ControlPlaneAgent agent(*pipeline, 11);
  pipeline->tamper_next(Interface::kF1C, 1);
  CHECK_THROWS_AS(agent.run_ue_context_setup(), AuthenticationFailure);
  CHECK(agent.du_contexts().empty());
}
