#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "ranemu/bytes.hpp"

namespace ranemu::transport {

using Clock = std::chrono::steady_clock;

enum class TransportKind { kInProcess, kUdpLoopback };

TransportKind transport_kind_from_string(const std::string& s);
std::string to_string(TransportKind kind);

// One direction of a link. Both implementations are lossless and ordered
// within a direction; an optional fixed delay floors the one-way traversal.
class Endpoint {
 public:
  virtual ~Endpoint() = default;
  virtual void send(BytesView data) = 0;
  // Blocks up to `timeout`; nullopt on expiry.
  virtual std::optional<Bytes> recv(Clock::duration timeout) = 0;
  // Non-blocking, for the single-threaded driver.
  virtual std::optional<Bytes> try_recv() = 0;
};

// Test hook: rewrites bytes in flight on the A->B direction (installed by
// fault-injection tests; never used by experiments).
using TamperHook = std::function<void(Bytes&)>;

// Bidirectional link between two nodes.
class Duplex {
 public:
  virtual ~Duplex() = default;
  virtual Endpoint& end_a() = 0;  // sends a->b, receives b->a
  virtual Endpoint& end_b() = 0;
  virtual void set_tamper_hook(TamperHook hook) = 0;
};

struct TransportOptions {
  TransportKind kind = TransportKind::kInProcess;
  std::chrono::microseconds added_delay{0};
  uint16_t udp_port_a = 0;  // 0 = ephemeral
  uint16_t udp_port_b = 0;
};

// Builds the queue pair / socket pair for one link. Throws ConfigError when
// a requested UDP port is unavailable.
std::unique_ptr<Duplex> attach_transport(const TransportOptions& options);

}  // namespace ranemu::transport
