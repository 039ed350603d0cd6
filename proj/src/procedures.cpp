#include "ranemu/procedures.hpp"

#include <sstream>

#include "ranemu/errors.hpp"

namespace ranemu::procedures {

using scenario::Interface;
using transport::Clock;
using namespace std::chrono_literals;

namespace {

constexpr auto kProcedureTimeout = 2000ms;

// TLV types
constexpr uint8_t kTlvUeId = 0x01;
constexpr uint8_t kTlvF1uTeid = 0x02;
constexpr uint8_t kTlvN3Teid = 0x03;

void put_tlv_u32(Bytes& out, uint8_t type, uint32_t value) {
  put_u8(out, type);
  put_u16(out, 4);
  put_u32(out, value);
}

}  // namespace

std::string to_string(ProcedureKind p) {
  return p == ProcedureKind::kUeContextSetup ? "UeContextSetup"
                                             : "BearerContextSetup";
}

std::string to_string(MessageKind k) {
  return k == MessageKind::kRequest ? "request" : "response";
}

Bytes encode_message(const ProcedureMessage& msg) {
  Bytes out;
  put_u8(out, static_cast<uint8_t>(msg.procedure));
  put_u8(out, static_cast<uint8_t>(msg.kind));
  put_u32(out, msg.transaction_id);
  put_tlv_u32(out, kTlvUeId, msg.ue_id);
  if (msg.f1u_teid) put_tlv_u32(out, kTlvF1uTeid, *msg.f1u_teid);
  if (msg.n3_teid) put_tlv_u32(out, kTlvN3Teid, *msg.n3_teid);
  return out;
}

ProcedureMessage decode_message(BytesView wire) {
  size_t off = 0;
  ProcedureMessage msg{};
  uint8_t proc = get_u8(wire, off);
  if (proc != 1 && proc != 2)
    throw MalformedPacket("unknown procedure code");
  msg.procedure = static_cast<ProcedureKind>(proc);
  uint8_t kind = get_u8(wire, off);
  if (kind != 1 && kind != 2) throw MalformedPacket("unknown message kind");
  msg.kind = static_cast<MessageKind>(kind);
  msg.transaction_id = get_u32(wire, off);
  while (off < wire.size()) {
    uint8_t type = get_u8(wire, off);
    uint16_t len = get_u16(wire, off);
    if (off + len > wire.size())
      throw MalformedPacket("TLV length exceeds message");
    switch (type) {
      case kTlvUeId:
        if (len != 4) throw MalformedPacket("UE id TLV must be 4 bytes");
        msg.ue_id = get_u32(wire, off);
        break;
      case kTlvF1uTeid:
        if (len != 4) throw MalformedPacket("TEID TLV must be 4 bytes");
        msg.f1u_teid = get_u32(wire, off);
        break;
      case kTlvN3Teid:
        if (len != 4) throw MalformedPacket("TEID TLV must be 4 bytes");
        msg.n3_teid = get_u32(wire, off);
        break;
      default:
        throw MalformedPacket("unknown TLV type");
    }
  }
  return msg;
}

std::string ProcedureTranscript::to_text() const {
  std::ostringstream os;
  for (const auto& e : entries) {
    os << e.timestamp.count() << " " << e.direction << " "
       << procedures::to_string(e.procedure) << " "
       << procedures::to_string(e.kind) << " " << e.wire_length << "\n";
  }
  os << "duration_ns " << duration.count() << "\n";
  return os.str();
}

ControlPlaneAgent::ControlPlaneAgent(topology::Pipeline& pipeline,
                                     uint64_t seed)
    : pipeline_(&pipeline) {
  Bytes raw = derive_bytes(seed, "teid/cp-allocator", 4);
  size_t off = 0;
  next_teid_ = 0x40000000u + get_u32(raw, off) % 0x10000000u;
}

uint32_t ControlPlaneAgent::allocate_teid() {
  // Injective within the session; nonzero by construction.
  return ++next_teid_;
}

ProcedureTranscript ControlPlaneAgent::run_procedure(
    ProcedureKind procedure, Interface iface, const std::string& peer_name) {
  auto& cucp = pipeline_->cp_channel(iface, 0);
  auto& peer = pipeline_->cp_channel(iface, 1);

  ProcedureTranscript transcript;
  transcript.procedure = procedure;

  ProcedureMessage request{};
  request.procedure = procedure;
  request.kind = MessageKind::kRequest;
  request.transaction_id = next_transaction_++;
  request.ue_id = procedure == ProcedureKind::kUeContextSetup
                      ? next_ue_id_++
                      : (next_ue_id_ == 1 ? 1 : next_ue_id_ - 1);
  Bytes request_wire = encode_message(request);

  const auto t0 = Clock::now();
  auto stamp = [&] {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() -
                                                                t0);
  };

  transcript.entries.push_back({stamp(), "CU-CP->" + peer_name, procedure,
                                MessageKind::kRequest,
                                request_wire.size() +
                                    cucp.wire_overhead(request_wire.size())});
  cucp.send(request_wire);

  // Responder side: receive, install context, reply. Unauthentic or replayed
  // messages are dropped without side effects.
  ProcedureMessage req_msg{};
  bool got_request = false;
  auto deadline = Clock::now() + kProcedureTimeout;
  while (!got_request && Clock::now() < deadline) {
    std::optional<Bytes> wire;
    try {
      wire = peer.recv(1ms);
    } catch (const ReplayRejected&) {
      continue;  // duplicate delivery: drop silently
    }
    if (!wire) continue;
    req_msg = decode_message(*wire);
    if (req_msg.kind != MessageKind::kRequest ||
        req_msg.procedure != procedure)
      continue;
    got_request = true;
  }
  if (!got_request)
    throw TimeoutError(to_string(procedure) + " request not received by " +
                       peer_name);

  ProcedureMessage response = req_msg;
  response.kind = MessageKind::kResponse;
  if (procedure == ProcedureKind::kUeContextSetup) {
    du_contexts_.push_back(UeContext{req_msg.ue_id});
  } else {
    BearerContext ctx{req_msg.ue_id, allocate_teid(), allocate_teid()};
    cuup_contexts_.push_back(ctx);
    response.f1u_teid = ctx.f1u_teid;
    response.n3_teid = ctx.n3_teid;
  }
  Bytes response_wire = encode_message(response);
  transcript.entries.push_back({stamp(), peer_name + "->CU-CP", procedure,
                                MessageKind::kResponse,
                                response_wire.size() +
                                    peer.wire_overhead(response_wire.size())});
  peer.send(response_wire);

  // Initiator side: accept only the matching response; ignore duplicates and
  // mismatched transactions.
  deadline = Clock::now() + kProcedureTimeout;
  while (Clock::now() < deadline) {
    std::optional<Bytes> wire;
    try {
      wire = cucp.recv(1ms);
    } catch (const ReplayRejected&) {
      continue;
    }
    if (!wire) continue;
    ProcedureMessage resp = decode_message(*wire);
    if (resp.kind != MessageKind::kResponse ||
        resp.transaction_id != request.transaction_id)
      continue;  // duplicate or stale: ignored, transcript unchanged
    transcript.duration = stamp();
    transcript.response = resp;
    if (procedure == ProcedureKind::kBearerContextSetup) {
      if (!resp.f1u_teid || !resp.n3_teid || *resp.f1u_teid == 0 ||
          *resp.n3_teid == 0 || *resp.f1u_teid == *resp.n3_teid)
        throw MalformedPacket(
            "bearer-setup response must carry two distinct nonzero TEIDs");
    }
    return transcript;
  }
  throw TimeoutError(to_string(procedure) + " response not received");
}

ProcedureTranscript ControlPlaneAgent::run_ue_context_setup() {
  return run_procedure(ProcedureKind::kUeContextSetup, Interface::kF1C, "DU");
}

ProcedureTranscript ControlPlaneAgent::run_bearer_context_setup() {
  return run_procedure(ProcedureKind::kBearerContextSetup, Interface::kE1,
                       "CU-UP");
}

ControlPlaneAgent::RegistrationResult
ControlPlaneAgent::run_registration_sequence() {
  // The AMF-stub only triggers the sequence; N1/N2 signaling is not modeled.
  RegistrationResult result;
  result.ue_context_setup = run_ue_context_setup();
  result.bearer_context_setup = run_bearer_context_setup();
  return result;
}

}  // namespace ranemu::procedures
