#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ranemu/bytes.hpp"
#include "ranemu/links.hpp"
#include "ranemu/scenario.hpp"
#include "ranemu/transport.hpp"

namespace ranemu::topology {

enum class NodeRole { kUe, kDu, kCuUp, kCuCp, kGnbMonolithic, kUpf, kAmfStub };
std::string to_string(NodeRole role);

struct LinkSpec {
  scenario::Interface interface;
  std::optional<SuiteId> suite;
  transport::TransportKind transport;
  std::chrono::microseconds added_delay{0};
};

struct TopologyDescription {
  scenario::Mode mode;
  std::vector<NodeRole> nodes;
  std::vector<LinkSpec> links;

  size_t secured_link_count() const;
};

struct EchoResult {
  std::chrono::nanoseconds rtt{0};
  // Crypto work performed during this echo, per node.
  std::map<std::string, links::CryptoOpCounts> crypto_ops;

  links::CryptoOpCounts total_ops() const;
};

// GTP-U tunnel ids installed on the user-plane links; defaults are derived
// from the scenario seed, and the E1 Bearer Context Setup response supplies
// fresh ones for the integration path.
struct TunnelIds {
  uint32_t f1u_teid = 0;
  uint32_t n3_teid = 0;
};

// A fully wired emulated deployment: user-plane chain (UE..UPF) plus, in
// disaggregated mode, the F1-C and E1 control-plane channels. All SAs and
// PDCP entities are provisioned at build time; no handshake traffic exists.
class Pipeline {
 public:
  virtual ~Pipeline() = default;

  virtual const TopologyDescription& description() const = 0;

  // Round trip UE -> UPF -> UE. Verifies the echoed payload byte-identical
  // and reports per-node crypto work; throws PipelineError naming the
  // failing link on any protection failure.
  virtual EchoResult send_echo(BytesView payload) = 0;

  virtual const TunnelIds& tunnel_ids() const = 0;
  virtual void install_tunnel_ids(const TunnelIds& ids) = 0;

  // Cumulative per-node counters since build.
  virtual std::map<std::string, links::CryptoOpCounts> node_ops() const = 0;

  // Control-plane channel endpoints (disaggregated only): index 0 = CU-CP
  // side, 1 = peer (DU for F1-C, CU-UP for E1).
  class CpChannel {
   public:
    virtual ~CpChannel() = default;
    virtual void send(BytesView message) = 0;
    virtual std::optional<Bytes> recv(std::chrono::milliseconds timeout) = 0;
    virtual size_t wire_overhead(size_t message_len) const = 0;
    virtual links::CryptoOpCounts& ops() = 0;
  };
  virtual CpChannel& cp_channel(scenario::Interface iface, int side) = 0;

  // Fault injection for tests: corrupt the next `count` messages crossing
  // the link in the UE->UPF / CU-CP->peer direction.
  virtual void tamper_next(scenario::Interface iface, int count) = 0;
};

std::unique_ptr<Pipeline> build_topology(const scenario::ScenarioConfig& cfg);

// Description-only build (validation + link table) without wiring state.
TopologyDescription describe_topology(const scenario::ScenarioConfig& cfg);

}  // namespace ranemu::topology
