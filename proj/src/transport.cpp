#include "ranemu/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>

#include "ranemu/errors.hpp"

namespace ranemu::transport {

TransportKind transport_kind_from_string(const std::string& s) {
  if (s == "in-process") return TransportKind::kInProcess;
  if (s == "udp-loopback") return TransportKind::kUdpLoopback;
  throw ConfigError("unknown transport '" + s +
                    "' (expected in-process or udp-loopback)");
}

std::string to_string(TransportKind kind) {
  return kind == TransportKind::kInProcess ? "in-process" : "udp-loopback";
}

namespace {

void apply_delay_floor(Clock::time_point deliver_at) {
  auto now = Clock::now();
  if (deliver_at <= now) return;
  // Sleep coarsely, then spin the last stretch for microsecond floors.
  auto remaining = deliver_at - now;
  if (remaining > std::chrono::milliseconds(1))
    std::this_thread::sleep_for(remaining - std::chrono::milliseconds(1));
  while (Clock::now() < deliver_at) std::this_thread::yield();
}

struct Message {
  Bytes data;
  Clock::time_point deliver_at;
};

class Queue {
 public:
  explicit Queue(std::chrono::microseconds delay) : delay_(delay) {}

  void push(BytesView data, const TamperHook& hook) {
    Bytes copy(data.begin(), data.end());
    if (hook) hook(copy);
    std::lock_guard lock(mutex_);
    messages_.push_back({std::move(copy), Clock::now() + delay_});
    cv_.notify_one();
  }

  std::optional<Bytes> pop(Clock::duration timeout) {
    std::unique_lock lock(mutex_);
    if (!cv_.wait_for(lock, timeout, [&] { return !messages_.empty(); }))
      return std::nullopt;
    Message msg = std::move(messages_.front());
    messages_.pop_front();
    lock.unlock();
    apply_delay_floor(msg.deliver_at);
    return std::move(msg.data);
  }

  std::optional<Bytes> try_pop() {
    std::unique_lock lock(mutex_);
    if (messages_.empty()) return std::nullopt;
    Message msg = std::move(messages_.front());
    messages_.pop_front();
    lock.unlock();
    apply_delay_floor(msg.deliver_at);
    return std::move(msg.data);
  }

 private:
  std::chrono::microseconds delay_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Message> messages_;
};

class QueueEndpoint : public Endpoint {
 public:
  QueueEndpoint(Queue& tx, Queue& rx, const TamperHook*& hook_slot,
                bool tamperable)
      : tx_(tx), rx_(rx), hook_slot_(hook_slot), tamperable_(tamperable) {}

  void send(BytesView data) override {
    static const TamperHook no_hook;
    tx_.push(data, tamperable_ && hook_slot_ ? *hook_slot_ : no_hook);
  }
  std::optional<Bytes> recv(Clock::duration timeout) override {
    return rx_.pop(timeout);
  }
  std::optional<Bytes> try_recv() override { return rx_.try_pop(); }

 private:
  Queue& tx_;
  Queue& rx_;
  const TamperHook*& hook_slot_;
  bool tamperable_;
};

class InProcessDuplex : public Duplex {
 public:
  explicit InProcessDuplex(std::chrono::microseconds delay)
      : a_to_b_(delay),
        b_to_a_(delay),
        end_a_(a_to_b_, b_to_a_, hook_ptr_, true),
        end_b_(b_to_a_, a_to_b_, hook_ptr_, false) {}

  Endpoint& end_a() override { return end_a_; }
  Endpoint& end_b() override { return end_b_; }
  void set_tamper_hook(TamperHook hook) override {
    hook_ = std::move(hook);
    hook_ptr_ = hook_ ? &hook_ : nullptr;
  }

 private:
  Queue a_to_b_;
  Queue b_to_a_;
  TamperHook hook_;
  const TamperHook* hook_ptr_ = nullptr;
  QueueEndpoint end_a_;
  QueueEndpoint end_b_;
};

// ---------------------------------------------------------------- UDP

class UdpSocket {
 public:
  explicit UdpSocket(uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) throw Error("socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      ::close(fd_);
      throw ConfigError("udp-loopback port " + std::to_string(port) +
                        " in use or unavailable");
    }
  }
  ~UdpSocket() {
    if (fd_ >= 0) ::close(fd_);
  }
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;

  uint16_t port() const {
    sockaddr_in addr{};
    socklen_t len = sizeof(addr);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    return ntohs(addr.sin_port);
  }

  void connect_to(uint16_t peer_port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(peer_port);
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
      throw Error("udp connect failed");
  }

  void send(BytesView data) {
    if (::send(fd_, data.data(), data.size(), 0) < 0)
      throw Error("udp send failed");
  }

  std::optional<Bytes> recv(Clock::duration timeout) {
    timeval tv{};
    auto us = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
    tv.tv_sec = static_cast<time_t>(us.count() / 1000000);
    tv.tv_usec = static_cast<suseconds_t>(us.count() % 1000000);
    fd_set set;
    FD_ZERO(&set);
    FD_SET(fd_, &set);
    int rc = ::select(fd_ + 1, &set, nullptr, nullptr, &tv);
    if (rc <= 0) return std::nullopt;
    Bytes buf(65536);
    ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
    if (n < 0) return std::nullopt;
    buf.resize(static_cast<size_t>(n));
    return buf;
  }

 private:
  int fd_ = -1;
};

class UdpEndpoint : public Endpoint {
 public:
  UdpEndpoint(UdpSocket& sock, std::chrono::microseconds delay,
              const TamperHook*& hook_slot, bool tamperable)
      : sock_(sock), delay_(delay), hook_slot_(hook_slot),
        tamperable_(tamperable) {}

  void send(BytesView data) override {
    // UDP cannot carry a deliver-at timestamp, so the sender pre-sleeps.
    if (delay_.count() > 0) apply_delay_floor(Clock::now() + delay_);
    if (tamperable_ && hook_slot_) {
      Bytes copy(data.begin(), data.end());
      (*hook_slot_)(copy);
      sock_.send(copy);
    } else {
      sock_.send(data);
    }
  }

  std::optional<Bytes> recv(Clock::duration timeout) override {
    return sock_.recv(timeout);
  }
  std::optional<Bytes> try_recv() override {
    return sock_.recv(std::chrono::microseconds(0));
  }

 private:
  UdpSocket& sock_;
  std::chrono::microseconds delay_;
  const TamperHook*& hook_slot_;
  bool tamperable_;
};

class UdpDuplex : public Duplex {
 public:
  UdpDuplex(const TransportOptions& opt)
      : sock_a_(opt.udp_port_a),
        sock_b_(opt.udp_port_b),
        end_a_(sock_a_, opt.added_delay, hook_ptr_, true),
        end_b_(sock_b_, opt.added_delay, hook_ptr_, false),
        delay_(opt.added_delay) {
    sock_a_.connect_to(sock_b_.port());
    sock_b_.connect_to(sock_a_.port());
  }

  Endpoint& end_a() override { return end_a_; }
  Endpoint& end_b() override { return end_b_; }
  void set_tamper_hook(TamperHook hook) override {
    hook_ = std::move(hook);
    hook_ptr_ = hook_ ? &hook_ : nullptr;
  }

 private:
  UdpSocket sock_a_;
  UdpSocket sock_b_;
  TamperHook hook_;
  const TamperHook* hook_ptr_ = nullptr;
  UdpEndpoint end_a_;
  UdpEndpoint end_b_;
  std::chrono::microseconds delay_;
};

}  // namespace

std::unique_ptr<Duplex> attach_transport(const TransportOptions& options) {
  if (options.kind == TransportKind::kInProcess)
    return std::make_unique<InProcessDuplex>(options.added_delay);
  return std::make_unique<UdpDuplex>(options);
}

}  // namespace ranemu::transport
