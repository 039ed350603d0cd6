#include "ranemu/topology.hpp"

#include <array>
#include <atomic>
#include <functional>
#include <thread>

#include "ranemu/errors.hpp"
#include "ranemu/wire.hpp"

namespace ranemu::topology {

using scenario::Interface;
using scenario::Mode;
using namespace std::chrono_literals;

std::string to_string(NodeRole role) {
  switch (role) {
    case NodeRole::kUe: return "UE";
    case NodeRole::kDu: return "DU";
    case NodeRole::kCuUp: return "CU-UP";
    case NodeRole::kCuCp: return "CU-CP";
    case NodeRole::kGnbMonolithic: return "gNB";
    case NodeRole::kUpf: return "UPF";
    case NodeRole::kAmfStub: return "AMF-stub";
  }
  return "?";
}

size_t TopologyDescription::secured_link_count() const {
  size_t n = 0;
  for (const auto& l : links)
    if (l.suite) ++n;
  return n;
}

links::CryptoOpCounts EchoResult::total_ops() const {
  links::CryptoOpCounts total;
  for (const auto& [name, ops] : crypto_ops) total += ops;
  return total;
}

namespace {

constexpr auto kHopTimeout = 2000ms;

Bytes derive_link_key(const scenario::ScenarioConfig& cfg, Interface iface,
                      const std::string& purpose, size_t n) {
  const auto& link = cfg.link(iface);
  if (link.key_material) {
    // Explicit material is expanded deterministically so one hex string can
    // feed every key the suite needs.
    Bytes seed_bytes = *link.key_material;
    Bytes out = derive_bytes(cfg.seed, scenario::interface_key(iface) + "/" +
                                           purpose + "/" + to_hex(seed_bytes),
                             n);
    return out;
  }
  return derive_bytes(cfg.seed,
                      scenario::interface_key(iface) + "/" + purpose, n);
}

links::SaKeys derive_sa_keys(const scenario::ScenarioConfig& cfg,
                             Interface iface, const SecuritySuite& suite,
                             const std::string& dir) {
  links::SaKeys keys;
  keys.enc_key = derive_link_key(cfg, iface, "enc-" + dir, suite.enc_key_len());
  keys.auth_key =
      derive_link_key(cfg, iface, "auth-" + dir, suite.auth_key_len());
  keys.salt = derive_link_key(cfg, iface, "salt-" + dir, suite.salt_len());
  return keys;
}

// Deterministic per-interface SPI block; unique within one build session.
uint32_t spi_for(Interface iface, bool downlink) {
  uint32_t base = 0;
  switch (iface) {
    case Interface::kF1U: base = 0x00F10000; break;
    case Interface::kN3: base = 0x00300000; break;
    case Interface::kF1C: base = 0x00FC0000; break;
    case Interface::kE1: base = 0x00E10000; break;
    case Interface::kUu: base = 0x00000000; break;
  }
  return base + (downlink ? 2 : 1);
}

// Per-link protection state for one hop direction owned by one node.
struct EspLinkEnd {
  std::optional<links::SecurityAssociation> tx;  // protect
  std::optional<links::SecurityAssociation> rx;  // unprotect

  bool secured() const { return tx.has_value(); }
  void attach(links::CryptoOpCounts* sink) {
    if (tx) tx->attach_counter(sink);
    if (rx) rx->attach_counter(sink);
  }
};

struct TamperState {
  std::atomic<int> remaining{0};
};

// Attributes a protection failure to the link it happened on. Tamper and
// replay keep their types so callers can distinguish them.
template <typename F>
auto on_link(Interface iface, F&& f) {
  const auto prefix = [&] {
    return "failure on link " + scenario::interface_name(iface) + ": ";
  };
  try {
    return f();
  } catch (const AuthenticationFailure& e) {
    throw AuthenticationFailure(prefix() + e.what());
  } catch (const ReplayRejected&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError(prefix() + e.what());
  }
}

class PipelineImpl;

// Control-plane channel: one endpoint of an optionally protected duplex.
class CpChannelImpl : public Pipeline::CpChannel {
 public:
  CpChannelImpl(Interface iface, transport::Endpoint& ep,
                links::CryptoOpCounts& ops)
      : iface_(iface), endpoint_(ep), ops_(ops) {}

  void set_esp(links::SecurityAssociation tx, links::SecurityAssociation rx) {
    esp_ = EspLinkEnd{std::move(tx), std::move(rx)};
  }
  void set_dtls(links::DtlsEndpoint dtls) { dtls_.emplace(std::move(dtls)); }

  void send(BytesView message) override {
    Bytes wire(message.begin(), message.end());
    on_link(iface_, [&] {
      if (esp_) {
        wire = esp_->tx->protect(wire);
        ops_.esp_protect++;
      } else if (dtls_) {
        wire = dtls_->protect(wire);
        ops_.dtls_protect++;
      }
    });
    endpoint_.send(wire);
  }

  std::optional<Bytes> recv(std::chrono::milliseconds timeout) override {
    auto wire = endpoint_.recv(timeout);
    if (!wire) return std::nullopt;
    return on_link(iface_, [&]() -> std::optional<Bytes> {
      if (esp_) {
        Bytes inner = esp_->rx->unprotect(*wire);
        ops_.esp_unprotect++;
        return inner;
      }
      if (dtls_) {
        Bytes inner = dtls_->unprotect(*wire);
        ops_.dtls_unprotect++;
        return inner;
      }
      return wire;
    });
  }

  size_t wire_overhead(size_t message_len) const override {
    if (dtls_) return wire::kDtlsHeaderLen + 16;
    if (esp_) {
      const auto& suite = esp_->tx->suite();
      Bytes padded = crypto::esp_pad(Bytes(message_len, 0),
                                     suite.esp_pad_align());
      return 8 + suite.iv_len + suite.tag_len + (padded.size() - message_len);
    }
    return 0;
  }

  links::CryptoOpCounts& ops() override { return ops_; }

 private:
  Interface iface_;
  transport::Endpoint& endpoint_;
  std::optional<EspLinkEnd> esp_;
  std::optional<links::DtlsEndpoint> dtls_;
  links::CryptoOpCounts& ops_;
};

// One forwarding stage of the user-plane chain. `left` faces the UE.
class ForwardingNode {
 public:
  virtual ~ForwardingNode() = default;
  virtual std::string name() const = 0;
  // Handles one uplink (left->right) message.
  virtual void uplink(BytesView in) = 0;
  // Handles one downlink (right->left) message.
  virtual void downlink(BytesView in) = 0;

  transport::Endpoint* left = nullptr;
  transport::Endpoint* right = nullptr;

  // Processes at most one pending message from either side.
  bool step() {
    if (left) {
      if (auto msg = left->try_recv()) {
        uplink(*msg);
        return true;
      }
    }
    if (right) {
      if (auto msg = right->try_recv()) {
        downlink(*msg);
        return true;
      }
    }
    return false;
  }
};

struct UuEnd {
  std::optional<links::PdcpEntity> pdcp;
};

// DU: forwards PDCP-protected Uu PDUs opaquely inside the F1-U GTP-U tunnel.
class DuNode : public ForwardingNode {
 public:
  DuNode(links::CryptoOpCounts& ops, const TunnelIds*& ids)
      : ops_(ops), ids_(ids) {}

  std::string name() const override { return "DU"; }

  void uplink(BytesView in) override {
    Bytes packet = wire::encode_gtpu(ids_->f1u_teid, in);
    if (f1u_.secured())
      packet = on_link(Interface::kF1U, [&] { return f1u_.tx->protect(packet); });
    right->send(packet);
  }

  void downlink(BytesView in) override {
    Bytes packet(in.begin(), in.end());
    if (f1u_.secured())
      packet =
          on_link(Interface::kF1U, [&] { return f1u_.rx->unprotect(packet); });
    auto gtpu = on_link(Interface::kF1U,
                        [&] { return wire::decode_gtpu(packet); });
    check_teid(Interface::kF1U, gtpu.teid, ids_->f1u_teid);
    left->send(gtpu.payload);
  }

  static void check_teid(Interface iface, uint32_t got, uint32_t want) {
    if (got != want)
      throw PipelineError("failure on link " + scenario::interface_name(iface) +
                          ": GTP-U TEID not provisioned");
  }

  EspLinkEnd f1u_;

 private:
  links::CryptoOpCounts& ops_;
  const TunnelIds*& ids_;
};

// CU-UP: terminates Uu (PDCP) and the F1-U tunnel; re-tunnels onto N3.
class CuUpNode : public ForwardingNode {
 public:
  CuUpNode(links::CryptoOpCounts& ops, const TunnelIds*& ids)
      : ops_(ops), ids_(ids) {}

  std::string name() const override { return "CU-UP"; }

  void uplink(BytesView in) override {
    Bytes packet(in.begin(), in.end());
    if (f1u_.secured())
      packet =
          on_link(Interface::kF1U, [&] { return f1u_.rx->unprotect(packet); });
    auto gtpu =
        on_link(Interface::kF1U, [&] { return wire::decode_gtpu(packet); });
    DuNode::check_teid(Interface::kF1U, gtpu.teid, ids_->f1u_teid);
    Bytes sdu = gtpu.payload;
    if (uu_.pdcp)
      sdu = on_link(Interface::kUu, [&] { return uu_.pdcp->unprotect(sdu); });
    Bytes out = wire::encode_gtpu(ids_->n3_teid, sdu);
    if (n3_.secured())
      out = on_link(Interface::kN3, [&] { return n3_.tx->protect(out); });
    right->send(out);
  }

  void downlink(BytesView in) override {
    Bytes packet(in.begin(), in.end());
    if (n3_.secured())
      packet =
          on_link(Interface::kN3, [&] { return n3_.rx->unprotect(packet); });
    auto gtpu =
        on_link(Interface::kN3, [&] { return wire::decode_gtpu(packet); });
    DuNode::check_teid(Interface::kN3, gtpu.teid, ids_->n3_teid);
    Bytes sdu = gtpu.payload;
    if (uu_.pdcp)
      sdu = on_link(Interface::kUu, [&] { return uu_.pdcp->protect(sdu); });
    Bytes out = wire::encode_gtpu(ids_->f1u_teid, sdu);
    if (f1u_.secured())
      out = on_link(Interface::kF1U, [&] { return f1u_.tx->protect(out); });
    left->send(out);
  }

  EspLinkEnd f1u_;
  EspLinkEnd n3_;
  UuEnd uu_;

 private:
  links::CryptoOpCounts& ops_;
  const TunnelIds*& ids_;
};

// Monolithic gNB: PDCP terminates here, N3 tunnel starts here.
class GnbNode : public ForwardingNode {
 public:
  GnbNode(links::CryptoOpCounts& ops, const TunnelIds*& ids)
      : ops_(ops), ids_(ids) {}

  std::string name() const override { return "gNB"; }

  void uplink(BytesView in) override {
    Bytes sdu(in.begin(), in.end());
    if (uu_.pdcp)
      sdu = on_link(Interface::kUu, [&] { return uu_.pdcp->unprotect(sdu); });
    Bytes out = wire::encode_gtpu(ids_->n3_teid, sdu);
    if (n3_.secured())
      out = on_link(Interface::kN3, [&] { return n3_.tx->protect(out); });
    right->send(out);
  }

  void downlink(BytesView in) override {
    Bytes packet(in.begin(), in.end());
    if (n3_.secured())
      packet =
          on_link(Interface::kN3, [&] { return n3_.rx->unprotect(packet); });
    auto gtpu =
        on_link(Interface::kN3, [&] { return wire::decode_gtpu(packet); });
    DuNode::check_teid(Interface::kN3, gtpu.teid, ids_->n3_teid);
    Bytes sdu = gtpu.payload;
    if (uu_.pdcp)
      sdu = on_link(Interface::kUu, [&] { return uu_.pdcp->protect(sdu); });
    left->send(sdu);
  }

  EspLinkEnd n3_;
  UuEnd uu_;

 private:
  links::CryptoOpCounts& ops_;
  const TunnelIds*& ids_;
};

// UPF: tunnel endpoint; echoes the user payload back downlink.
class UpfNode : public ForwardingNode {
 public:
  UpfNode(links::CryptoOpCounts& ops, const TunnelIds*& ids)
      : ops_(ops), ids_(ids) {}

  std::string name() const override { return "UPF"; }

  void uplink(BytesView in) override {
    Bytes packet(in.begin(), in.end());
    if (n3_.secured())
      packet =
          on_link(Interface::kN3, [&] { return n3_.rx->unprotect(packet); });
    auto gtpu =
        on_link(Interface::kN3, [&] { return wire::decode_gtpu(packet); });
    DuNode::check_teid(Interface::kN3, gtpu.teid, ids_->n3_teid);
    // echo
    Bytes out = wire::encode_gtpu(ids_->n3_teid, gtpu.payload);
    if (n3_.secured())
      out = on_link(Interface::kN3, [&] { return n3_.tx->protect(out); });
    left->send(out);
  }

  void downlink(BytesView) override {
    throw PipelineError("UPF has no downlink side");
  }

  EspLinkEnd n3_;

 private:
  links::CryptoOpCounts& ops_;
  const TunnelIds*& ids_;
};

class PipelineImpl : public Pipeline {
 public:
  explicit PipelineImpl(const scenario::ScenarioConfig& cfg);
  ~PipelineImpl() override { stop_workers(); }

  const TopologyDescription& description() const override { return desc_; }
  EchoResult send_echo(BytesView payload) override;
  const TunnelIds& tunnel_ids() const override { return tunnel_ids_; }
  void install_tunnel_ids(const TunnelIds& ids) override {
    if (ids.f1u_teid == 0 && desc_.mode == Mode::kDisaggregated)
      throw InvalidArgument("F1-U TEID must be nonzero");
    if (ids.n3_teid == 0) throw InvalidArgument("N3 TEID must be nonzero");
    tunnel_ids_ = ids;
  }
  std::map<std::string, links::CryptoOpCounts> node_ops() const override;
  CpChannel& cp_channel(Interface iface, int side) override;
  void tamper_next(Interface iface, int count) override;

 private:
  void build_user_plane(const scenario::ScenarioConfig& cfg);
  void build_control_plane(const scenario::ScenarioConfig& cfg);
  void start_workers();
  void stop_workers();

  scenario::ScenarioConfig cfg_;
  TopologyDescription desc_;
  TunnelIds tunnel_ids_;
  const TunnelIds* tunnel_ids_ptr_ = &tunnel_ids_;

  std::map<std::string, links::CryptoOpCounts> node_ops_;
  std::map<Interface, std::unique_ptr<transport::Duplex>> duplexes_;
  std::map<Interface, TamperState> tamper_;

  // UE side state
  UuEnd ue_uu_;
  transport::Endpoint* ue_endpoint_ = nullptr;

  std::vector<std::unique_ptr<ForwardingNode>> chain_;  // UE-adjacent first

  // CP channels: [iface][side]
  std::map<Interface, std::array<std::unique_ptr<CpChannelImpl>, 2>> cp_;

  bool threaded_ = false;
  std::vector<std::jthread> workers_;
  std::atomic<bool> stop_{false};
  std::mutex error_mutex_;
  std::exception_ptr worker_error_;
};

transport::TransportOptions link_transport_options(
    const scenario::ScenarioConfig& cfg, Interface iface) {
  transport::TransportOptions opt;
  opt.kind = cfg.transport;
  const auto& link = cfg.link(iface);
  opt.added_delay = link.added_delay;
  opt.udp_port_a = link.udp_port_a;
  opt.udp_port_b = link.udp_port_b;
  return opt;
}

PipelineImpl::PipelineImpl(const scenario::ScenarioConfig& cfg)
    : cfg_(cfg), threaded_(cfg.threaded) {
  desc_ = describe_topology(cfg);
  links::sa_reset_provisioning_session();
  auto teid_from = [&](const std::string& label, uint32_t base) {
    Bytes raw = derive_bytes(cfg.seed, label, 4);
    size_t off = 0;
    return base + get_u32(raw, off) % 0x0FFFFFFF + 1;
  };
  tunnel_ids_.f1u_teid = teid_from("teid/f1u", 0x10000000);
  tunnel_ids_.n3_teid = teid_from("teid/n3", 0x20000000);
  build_user_plane(cfg);
  if (cfg.mode == Mode::kDisaggregated) build_control_plane(cfg);
  if (threaded_) start_workers();
}

void PipelineImpl::build_user_plane(const scenario::ScenarioConfig& cfg) {
  // Uu entities: UE side transmits uplink, network side transmits downlink.
  std::optional<links::PdcpEntity> net_pdcp;
  if (cfg.link_secured(Interface::kUu)) {
    links::PdcpConfig pcfg;
    pcfg.bearer = 1;
    pcfg.integrity_key = derive_link_key(cfg, Interface::kUu, "nia2", 16);
    pcfg.ciphering_key = derive_link_key(cfg, Interface::kUu, "nea2", 16);
    pcfg.integrity_enabled = true;
    pcfg.ciphering_enabled = true;
    auto [ue_side, net_side] = links::pdcp_provision(pcfg);
    ue_uu_.pdcp.emplace(std::move(ue_side));
    net_pdcp.emplace(std::move(net_side));
    ue_uu_.pdcp->attach_counter(&node_ops_["UE"]);
  }

  auto provision_esp = [&](Interface iface) {
    const auto& suite = suite_by_id(*cfg.link(iface).suite);
    auto ul = links::sa_provision(
        suite, derive_sa_keys(cfg, iface, suite, "ul"), spi_for(iface, false));
    auto dl = links::sa_provision(
        suite, derive_sa_keys(cfg, iface, suite, "dl"), spi_for(iface, true));
    return std::pair{std::move(ul), std::move(dl)};
  };

  if (cfg.mode == Mode::kMonolithic) {
    auto gnb = std::make_unique<GnbNode>(node_ops_["gNB"], tunnel_ids_ptr_);
    if (net_pdcp) {
      gnb->uu_.pdcp.emplace(std::move(*net_pdcp));
      gnb->uu_.pdcp->attach_counter(&node_ops_["gNB"]);
    }
    if (cfg.link_secured(Interface::kN3)) {
      auto [ul, dl] = provision_esp(Interface::kN3);
      // gNB protects DL-bound nothing on N3; it protects uplink and
      // unprotects downlink.
      gnb->n3_.tx.emplace(std::move(ul.protect_side));
      gnb->n3_.rx.emplace(std::move(dl.unprotect_side));
      gnb->n3_.attach(&node_ops_["gNB"]);

      auto upf = std::make_unique<UpfNode>(node_ops_["UPF"], tunnel_ids_ptr_);
      upf->n3_.tx.emplace(std::move(dl.protect_side));
      upf->n3_.rx.emplace(std::move(ul.unprotect_side));
      upf->n3_.attach(&node_ops_["UPF"]);
      chain_.push_back(std::move(gnb));
      chain_.push_back(std::move(upf));
    } else {
      chain_.push_back(std::move(gnb));
      chain_.push_back(
          std::make_unique<UpfNode>(node_ops_["UPF"], tunnel_ids_ptr_));
    }
  } else {
    auto du = std::make_unique<DuNode>(node_ops_["DU"], tunnel_ids_ptr_);
    auto cuup = std::make_unique<CuUpNode>(node_ops_["CU-UP"], tunnel_ids_ptr_);
    auto upf = std::make_unique<UpfNode>(node_ops_["UPF"], tunnel_ids_ptr_);
    if (net_pdcp) {
      cuup->uu_.pdcp.emplace(std::move(*net_pdcp));
      cuup->uu_.pdcp->attach_counter(&node_ops_["CU-UP"]);
    }
    if (cfg.link_secured(Interface::kF1U)) {
      auto [ul, dl] = provision_esp(Interface::kF1U);
      du->f1u_.tx.emplace(std::move(ul.protect_side));
      du->f1u_.rx.emplace(std::move(dl.unprotect_side));
      du->f1u_.attach(&node_ops_["DU"]);
      cuup->f1u_.tx.emplace(std::move(dl.protect_side));
      cuup->f1u_.rx.emplace(std::move(ul.unprotect_side));
      cuup->f1u_.attach(&node_ops_["CU-UP"]);
    }
    if (cfg.link_secured(Interface::kN3)) {
      auto [ul, dl] = provision_esp(Interface::kN3);
      cuup->n3_.tx.emplace(std::move(ul.protect_side));
      cuup->n3_.rx.emplace(std::move(dl.unprotect_side));
      cuup->n3_.attach(&node_ops_["CU-UP"]);
      upf->n3_.tx.emplace(std::move(dl.protect_side));
      upf->n3_.rx.emplace(std::move(ul.unprotect_side));
      upf->n3_.attach(&node_ops_["UPF"]);
    }
    chain_.push_back(std::move(du));
    chain_.push_back(std::move(cuup));
    chain_.push_back(std::move(upf));
  }

  // Wire transports between UE, chain nodes.
  std::vector<Interface> up_links;
  if (cfg.mode == Mode::kMonolithic)
    up_links = {Interface::kUu, Interface::kN3};
  else
    up_links = {Interface::kUu, Interface::kF1U, Interface::kN3};

  for (size_t i = 0; i < up_links.size(); ++i) {
    auto duplex = transport::attach_transport(
        link_transport_options(cfg, up_links[i]));
    Interface iface = up_links[i];
    auto& tamper = tamper_[iface];
    duplex->set_tamper_hook([&tamper](Bytes& data) {
      int prev = tamper.remaining.load();
      while (prev > 0 &&
             !tamper.remaining.compare_exchange_weak(prev, prev - 1)) {
      }
      if (prev > 0 && !data.empty()) data[data.size() / 2] ^= 0x01;
    });
    if (i == 0)
      ue_endpoint_ = &duplex->end_a();
    else
      chain_[i - 1]->right = &duplex->end_a();
    chain_[i]->left = &duplex->end_b();
    duplexes_[iface] = std::move(duplex);
  }
}

void PipelineImpl::build_control_plane(const scenario::ScenarioConfig& cfg) {
  for (Interface iface : {Interface::kF1C, Interface::kE1}) {
    auto duplex =
        transport::attach_transport(link_transport_options(cfg, iface));
    auto& tamper = tamper_[iface];
    duplex->set_tamper_hook([&tamper](Bytes& data) {
      int prev = tamper.remaining.load();
      while (prev > 0 &&
             !tamper.remaining.compare_exchange_weak(prev, prev - 1)) {
      }
      if (prev > 0 && !data.empty()) data[data.size() / 2] ^= 0x01;
    });

    std::string peer = iface == Interface::kF1C ? "DU" : "CU-UP";
    auto a = std::make_unique<CpChannelImpl>(iface, duplex->end_a(),
                                             node_ops_["CU-CP"]);
    auto b = std::make_unique<CpChannelImpl>(iface, duplex->end_b(),
                                             node_ops_[peer]);
    if (cfg.link_secured(iface)) {
      const auto& suite = suite_by_id(*cfg.link(iface).suite);
      if (suite.id == SuiteId::kDtlsGcm128) {
        links::DtlsKeys fwd{derive_link_key(cfg, iface, "dtls-key-ab", 16),
                            derive_link_key(cfg, iface, "dtls-salt-ab", 4)};
        links::DtlsKeys rev{derive_link_key(cfg, iface, "dtls-key-ba", 16),
                            derive_link_key(cfg, iface, "dtls-salt-ba", 4)};
        auto [end_a, end_b] = links::dtls_provision(fwd, rev);
        a->set_dtls(std::move(end_a));
        b->set_dtls(std::move(end_b));
      } else {
        auto fwd = links::sa_provision(
            suite, derive_sa_keys(cfg, iface, suite, "ul"),
            spi_for(iface, false));
        auto rev = links::sa_provision(
            suite, derive_sa_keys(cfg, iface, suite, "dl"),
            spi_for(iface, true));
        a->set_esp(std::move(fwd.protect_side), std::move(rev.unprotect_side));
        b->set_esp(std::move(rev.protect_side), std::move(fwd.unprotect_side));
      }
    }
    cp_[iface][0] = std::move(a);
    cp_[iface][1] = std::move(b);
    duplexes_[iface] = std::move(duplex);
  }
}

void PipelineImpl::start_workers() {
  for (auto& node : chain_) {
    workers_.emplace_back([this, node = node.get()](std::stop_token st) {
      while (!st.stop_requested() && !stop_.load(std::memory_order_relaxed)) {
        try {
          if (!node->step()) std::this_thread::yield();
        } catch (...) {
          std::lock_guard lock(error_mutex_);
          if (!worker_error_) worker_error_ = std::current_exception();
        }
      }
    });
  }
}

void PipelineImpl::stop_workers() {
  stop_.store(true);
  for (auto& w : workers_) w.request_stop();
  workers_.clear();
}

EchoResult PipelineImpl::send_echo(BytesView payload) {
  auto before = node_ops_;

  Bytes uplink(payload.begin(), payload.end());
  if (ue_uu_.pdcp)
    uplink =
        on_link(Interface::kUu, [&] { return ue_uu_.pdcp->protect(uplink); });

  auto start = transport::Clock::now();
  ue_endpoint_->send(uplink);

  std::optional<Bytes> reply;
  if (threaded_) {
    reply = ue_endpoint_->recv(kHopTimeout);
    if (!reply) {
      std::lock_guard lock(error_mutex_);
      if (worker_error_) {
        auto err = worker_error_;
        worker_error_ = nullptr;
        std::rethrow_exception(err);
      }
      throw TimeoutError("echo reply not received");
    }
  } else {
    // Deterministic mode: the driver pumps every node in chain order until
    // the reply lands at the UE.
    for (int guard = 0; guard < 1000 && !reply; ++guard) {
      for (auto& node : chain_) {
        while (node->step()) {
        }
      }
      reply = ue_endpoint_->try_recv();
    }
    if (!reply) throw TimeoutError("echo reply not received");
  }
  auto rtt = transport::Clock::now() - start;

  Bytes echoed = *reply;
  if (ue_uu_.pdcp)
    echoed =
        on_link(Interface::kUu, [&] { return ue_uu_.pdcp->unprotect(echoed); });

  if (!std::equal(echoed.begin(), echoed.end(), payload.begin(),
                  payload.end()))
    throw PipelineError("echoed payload differs from sent payload");

  EchoResult result;
  result.rtt = std::chrono::duration_cast<std::chrono::nanoseconds>(rtt);
  for (const auto& [name, ops] : node_ops_) {
    links::CryptoOpCounts delta = ops;
    auto it = before.find(name);
    if (it != before.end()) {
      delta.pdcp_mac -= it->second.pdcp_mac;
      delta.pdcp_cipher -= it->second.pdcp_cipher;
      delta.esp_protect -= it->second.esp_protect;
      delta.esp_unprotect -= it->second.esp_unprotect;
      delta.dtls_protect -= it->second.dtls_protect;
      delta.dtls_unprotect -= it->second.dtls_unprotect;
    }
    result.crypto_ops[name] = delta;
  }
  return result;
}

std::map<std::string, links::CryptoOpCounts> PipelineImpl::node_ops() const {
  return node_ops_;
}

Pipeline::CpChannel& PipelineImpl::cp_channel(Interface iface, int side) {
  auto it = cp_.find(iface);
  if (it == cp_.end())
    throw ConfigError("no control-plane channel on " +
                      scenario::interface_name(iface));
  return *it->second.at(static_cast<size_t>(side));
}

void PipelineImpl::tamper_next(Interface iface, int count) {
  tamper_[iface].remaining.store(count);
}

}  // namespace

TopologyDescription describe_topology(const scenario::ScenarioConfig& cfg) {
  TopologyDescription desc;
  desc.mode = cfg.mode;
  auto add_link = [&](Interface iface) {
    desc.links.push_back(LinkSpec{iface, cfg.link(iface).suite, cfg.transport,
                                  cfg.link(iface).added_delay});
  };
  if (cfg.mode == Mode::kMonolithic) {
    desc.nodes = {NodeRole::kUe, NodeRole::kGnbMonolithic, NodeRole::kUpf};
    add_link(Interface::kUu);
    add_link(Interface::kN3);
  } else {
    desc.nodes = {NodeRole::kUe,   NodeRole::kDu,  NodeRole::kCuUp,
                  NodeRole::kCuCp, NodeRole::kUpf, NodeRole::kAmfStub};
    add_link(Interface::kUu);
    add_link(Interface::kF1U);
    add_link(Interface::kN3);
    add_link(Interface::kF1C);
    add_link(Interface::kE1);
  }
  for (const auto& l : desc.links) {
    if (l.suite && !scenario::suite_valid_for_interface(l.interface, *l.suite))
      throw ConfigError("suite not valid for interface " +
                        scenario::interface_name(l.interface));
  }
  return desc;
}

std::unique_ptr<Pipeline> build_topology(const scenario::ScenarioConfig& cfg) {
  return std::make_unique<PipelineImpl>(cfg);
}

}  // namespace ranemu::topology
