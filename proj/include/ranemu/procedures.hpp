#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ranemu/bytes.hpp"
#include "ranemu/topology.hpp"

namespace ranemu::procedures {

enum class ProcedureKind : uint8_t {
  kUeContextSetup = 1,
  kBearerContextSetup = 2,
};

enum class MessageKind : uint8_t { kRequest = 1, kResponse = 2 };

std::string to_string(ProcedureKind p);
std::string to_string(MessageKind k);

// Simplified TLV control message (ASN.1 PER fidelity is a non-goal; wire
// lengths stay deterministic and auditable).
struct ProcedureMessage {
  ProcedureKind procedure;
  MessageKind kind;
  uint32_t transaction_id = 0;
  uint32_t ue_id = 0;
  // Bearer Context Setup response only: freshly allocated tunnel ids.
  std::optional<uint32_t> f1u_teid;
  std::optional<uint32_t> n3_teid;

  bool operator==(const ProcedureMessage&) const = default;
};

Bytes encode_message(const ProcedureMessage& msg);
ProcedureMessage decode_message(BytesView wire);

struct TranscriptEntry {
  std::chrono::nanoseconds timestamp;  // relative to procedure start
  std::string direction;               // e.g. "CU-CP->DU"
  ProcedureKind procedure;
  MessageKind kind;
  size_t wire_length;
};

// Ordered, timestamped log of one procedure run.
struct ProcedureTranscript {
  ProcedureKind procedure;
  std::vector<TranscriptEntry> entries;
  std::chrono::nanoseconds duration{0};  // request send -> response receive
  ProcedureMessage response;

  std::string to_text() const;  // one message per line
};

// DU-side and CU-UP-side contexts installed by the procedures.
struct UeContext {
  uint32_t ue_id;
};
struct BearerContext {
  uint32_t ue_id;
  uint32_t f1u_teid;
  uint32_t n3_teid;
};

// Executes the procedures the measurements time. The responder state lives
// in this agent between runs so TEID allocation stays injective per session.
class ControlPlaneAgent {
 public:
  explicit ControlPlaneAgent(topology::Pipeline& pipeline, uint64_t seed);

  ProcedureTranscript run_ue_context_setup();
  ProcedureTranscript run_bearer_context_setup();

  struct RegistrationResult {
    ProcedureTranscript ue_context_setup;
    ProcedureTranscript bearer_context_setup;
  };
  // UE registration reduced to its two measured sub-procedures, triggered
  // by the AMF-stub.
  RegistrationResult run_registration_sequence();

  const std::vector<UeContext>& du_contexts() const { return du_contexts_; }
  const std::vector<BearerContext>& cuup_contexts() const {
    return cuup_contexts_;
  }

 private:
  ProcedureTranscript run_procedure(ProcedureKind procedure,
                                    scenario::Interface iface,
                                    const std::string& peer_name);
  uint32_t allocate_teid();

  topology::Pipeline* pipeline_;
  uint32_t next_transaction_ = 1;
  uint32_t next_ue_id_ = 1;
  uint32_t next_teid_;
  std::vector<UeContext> du_contexts_;
  std::vector<BearerContext> cuup_contexts_;
};

}  // namespace ranemu::procedures
