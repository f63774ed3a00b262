#include "core/protocol.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <mutex>

#include "core/errors.hpp"
#include "core/log.hpp"
#include "core/rng.hpp"

namespace beamsweep {

const char* to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::Hello: return "HELLO";
    case MessageKind::Ready: return "READY";
    case MessageKind::AdvanceAck: return "ADVANCE_ACK";
    case MessageKind::Quit: return "QUIT";
  }
  return "?";
}

std::array<uint8_t, kWireSize> encode_message(const ControlMessage& msg) {
  std::array<uint8_t, kWireSize> wire{};
  wire[0] = static_cast<uint8_t>(msg.kind);
  wire[1] = static_cast<uint8_t>(msg.seq >> 24);
  wire[2] = static_cast<uint8_t>(msg.seq >> 16);
  wire[3] = static_cast<uint8_t>(msg.seq >> 8);
  wire[4] = static_cast<uint8_t>(msg.seq);
  wire[5] = static_cast<uint8_t>(msg.tx_index >> 8);
  wire[6] = static_cast<uint8_t>(msg.tx_index);
  return wire;
}

ControlMessage decode_message(std::span<const uint8_t> datagram) {
  if (datagram.size() != kWireSize) {
    throw ParseError(1, "datagram has " + std::to_string(datagram.size()) +
                            " bytes, expected " + std::to_string(kWireSize));
  }
  const uint8_t kind = datagram[0];
  if (kind < 0x01 || kind > 0x04) {
    throw ParseError(1,
                     "unknown message kind " + std::to_string(int{kind}));
  }
  ControlMessage msg;
  msg.kind = static_cast<MessageKind>(kind);
  msg.seq = (static_cast<uint32_t>(datagram[1]) << 24) |
            (static_cast<uint32_t>(datagram[2]) << 16) |
            (static_cast<uint32_t>(datagram[3]) << 8) |
            static_cast<uint32_t>(datagram[4]);
  msg.tx_index = static_cast<uint16_t>((datagram[5] << 8) | datagram[6]);
  return msg;
}

int SessionLog::count(SessionEvent::Type type, MessageKind kind) const {
  int n = 0;
  for (const SessionEvent& e : events) {
    if (e.type == type && e.msg.kind == kind) ++n;
  }
  return n;
}

std::vector<ControlMessage> SessionLog::accepted() const {
  std::vector<ControlMessage> out;
  for (const SessionEvent& e : events) {
    if (e.type == SessionEvent::Type::Accepted) out.push_back(e.msg);
  }
  return out;
}

// ---------------------------------------------------------------------------
// In-memory link

namespace {

struct MemoryLinkState {
  std::mutex mutex;
  std::condition_variable cv;
  std::deque<std::vector<uint8_t>> queue[2];  // queue[i]: inbox of endpoint i
  bool closed[2] = {false, false};
  double drop_probability = 0.0;
  // One stream per direction so drop decisions do not depend on how the two
  // endpoint threads interleave.
  std::unique_ptr<RandomStream> drop_rng[2];
};

class MemoryEndpoint : public Transport {
 public:
  MemoryEndpoint(std::shared_ptr<MemoryLinkState> state, int index)
      : state_(std::move(state)), index_(index) {}

  ~MemoryEndpoint() override { close(); }

  void send(std::span<const uint8_t> datagram) override {
    std::lock_guard<std::mutex> lock(state_->mutex);
    if (state_->closed[index_]) return;
    if (state_->drop_probability > 0.0 &&
        state_->drop_rng[index_]->uniform() < state_->drop_probability) {
      logf(LogLevel::Debug, "memory link dropped a datagram from endpoint ",
           index_);
      return;
    }
    state_->queue[1 - index_].emplace_back(datagram.begin(), datagram.end());
    state_->cv.notify_all();
  }

  RecvResult receive(std::chrono::milliseconds timeout) override {
    std::unique_lock<std::mutex> lock(state_->mutex);
    auto& inbox = state_->queue[index_];
    state_->cv.wait_for(lock, timeout, [&] {
      return !inbox.empty() || state_->closed[1 - index_] ||
             state_->closed[index_];
    });
    if (!inbox.empty()) {
      RecvResult r{RecvStatus::Data, std::move(inbox.front())};
      inbox.pop_front();
      return r;
    }
    if (state_->closed[1 - index_] || state_->closed[index_]) {
      return {RecvStatus::Closed, {}};
    }
    return {RecvStatus::Timeout, {}};
  }

  void close() override {
    std::lock_guard<std::mutex> lock(state_->mutex);
    state_->closed[index_] = true;
    state_->cv.notify_all();
  }

 private:
  std::shared_ptr<MemoryLinkState> state_;
  int index_;
};

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>>
make_memory_link(const MemoryLinkOptions& options) {
  if (options.drop_probability < 0.0 || options.drop_probability >= 1.0) {
    throw DomainError("drop probability must lie in [0, 1)");
  }
  auto state = std::make_shared<MemoryLinkState>();
  state->drop_probability = options.drop_probability;
  state->drop_rng[0] =
      std::make_unique<RandomStream>(derive_seed({options.seed, 0}));
  state->drop_rng[1] =
      std::make_unique<RandomStream>(derive_seed({options.seed, 1}));
  return {std::make_unique<MemoryEndpoint>(state, 0),
          std::make_unique<MemoryEndpoint>(state, 1)};
}

// ---------------------------------------------------------------------------
// UDP transport

namespace {

sockaddr_in parse_addr(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) {
    throw DomainError("address '" + addr + "' is not host:port");
  }
  const std::string host = addr.substr(0, colon);
  const std::string port = addr.substr(colon + 1);
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  char* end = nullptr;
  const long p = std::strtol(port.c_str(), &end, 10);
  if (end == port.c_str() || *end != '\0' || p < 0 || p > 65535) {
    throw DomainError("bad port in '" + addr + "'");
  }
  sa.sin_port = htons(static_cast<uint16_t>(p));
  if (::inet_pton(AF_INET, host.c_str(), &sa.sin_addr) != 1) {
    throw DomainError("bad IPv4 host in '" + addr + "'");
  }
  return sa;
}

}  // namespace

UdpTransport::UdpTransport(const std::string& bind_addr) {
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw IoError("socket(): " + std::string(std::strerror(errno)));
  sockaddr_in sa = parse_addr(bind_addr);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0) {
    const std::string what = std::strerror(errno);
    ::close(fd_);
    fd_ = -1;
    throw IoError("bind(" + bind_addr + "): " + what);
  }
}

UdpTransport::~UdpTransport() { close(); }

void UdpTransport::set_peer(const std::string& peer_addr) {
  sockaddr_in sa = parse_addr(peer_addr);
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0) {
    throw IoError("connect(" + peer_addr + "): " +
                  std::string(std::strerror(errno)));
  }
  peer_set_ = true;
}

uint16_t UdpTransport::local_port() const {
  sockaddr_in sa{};
  socklen_t len = sizeof sa;
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&sa), &len) != 0) {
    throw IoError("getsockname(): " + std::string(std::strerror(errno)));
  }
  return ntohs(sa.sin_port);
}

void UdpTransport::send(std::span<const uint8_t> datagram) {
  if (fd_ < 0) return;
  if (!peer_set_) throw IoError("UDP peer address not set");
  // Datagram loss is part of the service model; ignore transient errors.
  (void)::send(fd_, datagram.data(), datagram.size(), 0);
}

Transport::RecvResult UdpTransport::receive(std::chrono::milliseconds timeout) {
  if (fd_ < 0) return {RecvStatus::Closed, {}};
  pollfd pfd{fd_, POLLIN, 0};
  const int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  if (rc <= 0) return {RecvStatus::Timeout, {}};
  std::vector<uint8_t> buf(64);
  const ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
  if (n < 0) return {RecvStatus::Timeout, {}};
  buf.resize(static_cast<size_t>(n));
  return {RecvStatus::Data, std::move(buf)};
}

void UdpTransport::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

// ---------------------------------------------------------------------------
// State machines

namespace {

class SessionLogger {
 public:
  explicit SessionLogger(const char* role) : role_(role) {}

  void message(SessionLog& log, SessionEvent::Type type,
               const ControlMessage& msg) {
    log.events.push_back({type, msg, {}});
    logf(LogLevel::Debug, role_, " ", event_name(type), " ",
         to_string(msg.kind), " seq=", msg.seq, " tx_index=", msg.tx_index);
  }

  void state(SessionLog& log, std::string name) {
    logf(LogLevel::Debug, role_, " -> ", name);
    log.events.push_back({SessionEvent::Type::State, {}, std::move(name)});
  }

 private:
  static const char* event_name(SessionEvent::Type type) {
    switch (type) {
      case SessionEvent::Type::Sent: return "sent";
      case SessionEvent::Type::Accepted: return "accepted";
      case SessionEvent::Type::Dropped: return "dropped";
      case SessionEvent::Type::Retransmitted: return "retransmitted";
      case SessionEvent::Type::State: return "state";
    }
    return "?";
  }

  const char* role_;
};

void send_message(Transport& transport, const ControlMessage& msg) {
  const auto wire = encode_message(msg);
  transport.send(wire);
}

}  // namespace

SessionLog run_transmitter(const Codebook& codebook_f, Transport& transport,
                           const ProgramWeightsFn& program_weights,
                           const ProtocolOptions& options) {
  codebook_f.validate();
  const uint16_t num_entries = static_cast<uint16_t>(codebook_f.size());

  SessionLog log;
  SessionLogger logger("tx");
  uint32_t next_send_seq = 0;
  int64_t last_peer_seq = -1;  // highest accepted receiver seq
  ControlMessage last_response{};
  bool have_response = false;
  uint16_t tx_index = 0;

  // The first codebook entry is live before the session starts, mirroring a
  // transmitter that begins radiating at launch.
  program_weights(0);
  logger.state(log, "Transmitting(0)");
  logger.state(log, "AwaitHello");

  enum class Phase { AwaitHello, AwaitReady, Done } phase = Phase::AwaitHello;
  int consecutive_timeouts = 0;
  // The transmitter is the responding side: between its answers the
  // receiver is legitimately busy (getting started, or measuring a whole
  // codebook pass), so its liveness bound is much wider than one
  // retransmission budget.
  const int patience = (options.max_retries + 1) * 15;

  while (phase != Phase::Done) {
    const auto r = transport.receive(options.retry_timeout);
    if (r.status == Transport::RecvStatus::Timeout) {
      if (++consecutive_timeouts >= patience) {
        throw PeerUnreachableError(
            "transmitter heard nothing for " +
            std::to_string(consecutive_timeouts) + " intervals while in " +
            (phase == Phase::AwaitHello ? std::string("AwaitHello")
                                        : "AwaitReady(" +
                                              std::to_string(tx_index) + ")"));
      }
      continue;
    }
    if (r.status == Transport::RecvStatus::Closed) {
      throw PeerUnreachableError("peer endpoint closed mid-session");
    }
    consecutive_timeouts = 0;

    ControlMessage msg;
    try {
      msg = decode_message(r.payload);
    } catch (const ParseError& e) {
      logf(LogLevel::Warn, "tx ignoring undecodable datagram: ", e.what());
      continue;
    }

    if (static_cast<int64_t>(msg.seq) <= last_peer_seq) {
      // Duplicate of something already processed: re-answer and move on.
      logger.message(log, SessionEvent::Type::Dropped, msg);
      if (have_response) {
        send_message(transport, last_response);
        logger.message(log, SessionEvent::Type::Retransmitted, last_response);
      }
      continue;
    }
    if (static_cast<int64_t>(msg.seq) != last_peer_seq + 1) {
      // A gap: an earlier datagram is still in flight; wait for it.
      logger.message(log, SessionEvent::Type::Dropped, msg);
      continue;
    }

    switch (phase) {
      case Phase::AwaitHello:
        if (msg.kind != MessageKind::Hello) {
          logger.message(log, SessionEvent::Type::Dropped, msg);
          break;
        }
        logger.message(log, SessionEvent::Type::Accepted, msg);
        last_peer_seq = msg.seq;
        phase = Phase::AwaitReady;
        logger.state(log, "AwaitReady(0)");
        break;

      case Phase::AwaitReady: {
        if (msg.kind != MessageKind::Ready) {
          logger.message(log, SessionEvent::Type::Dropped, msg);
          break;
        }
        logger.message(log, SessionEvent::Type::Accepted, msg);
        last_peer_seq = msg.seq;
        if (tx_index + 1 < num_entries) {
          ++tx_index;
          last_response = {MessageKind::AdvanceAck, next_send_seq++, tx_index};
          have_response = true;
          send_message(transport, last_response);
          logger.message(log, SessionEvent::Type::Sent, last_response);
          program_weights(tx_index);
          logger.state(log, "Transmitting(" + std::to_string(tx_index) + ")");
          logger.state(log, "AwaitReady(" + std::to_string(tx_index) + ")");
        } else {
          last_response = {MessageKind::Quit, next_send_seq++, 0};
          have_response = true;
          send_message(transport, last_response);
          logger.message(log, SessionEvent::Type::Sent, last_response);
          phase = Phase::Done;
          logger.state(log, "Done");
        }
        break;
      }

      case Phase::Done:
        break;
    }
  }

  // Linger to re-answer a duplicated final READY if our QUIT was lost. The
  // quiet period must outlast the receiver's full retransmission budget,
  // otherwise a dropped QUIT strands it; the peer closing ends it early.
  int quiet_intervals = 0;
  while (quiet_intervals <= options.max_retries) {
    const auto r = transport.receive(options.retry_timeout);
    if (r.status == Transport::RecvStatus::Closed) break;
    if (r.status == Transport::RecvStatus::Timeout) {
      ++quiet_intervals;
      continue;
    }
    quiet_intervals = 0;
    ControlMessage msg;
    try {
      msg = decode_message(r.payload);
    } catch (const ParseError&) {
      continue;
    }
    logger.message(log, SessionEvent::Type::Dropped, msg);
    if (msg.kind == MessageKind::Ready &&
        static_cast<int64_t>(msg.seq) <= last_peer_seq) {
      send_message(transport, last_response);
      logger.message(log, SessionEvent::Type::Retransmitted, last_response);
    }
  }
  transport.close();
  return log;
}

SweepRecord run_receiver(const Codebook& codebook_w, Transport& transport,
                         const MeasureFn& measure,
                         const ProtocolOptions& options) {
  codebook_w.validate();
  const uint16_t num_rx = static_cast<uint16_t>(codebook_w.size());

  SweepRecord record;
  record.num_rx = num_rx;
  SessionLogger logger("rx");
  SessionLog& log = record.log;

  uint32_t next_send_seq = 0;
  int64_t last_peer_seq = -1;
  logger.state(log, "Hello");
  const ControlMessage hello{MessageKind::Hello, next_send_seq++, 0};
  send_message(transport, hello);
  logger.message(log, SessionEvent::Type::Sent, hello);
  bool hello_acked = false;

  uint16_t tx_index = 0;
  for (;;) {
    // Sweep the full receive codebook for this transmit epoch.
    for (uint16_t rx_index = 0; rx_index < num_rx; ++rx_index) {
      logger.state(log, "Sweeping(" + std::to_string(tx_index) + "," +
                            std::to_string(rx_index) + ")");
      record.reports.push_back(measure(tx_index, rx_index));
    }
    record.num_tx = tx_index + 1;

    const ControlMessage ready{MessageKind::Ready, next_send_seq++, 0};
    send_message(transport, ready);
    logger.message(log, SessionEvent::Type::Sent, ready);
    logger.state(log, "AwaitAdvance(" + std::to_string(tx_index) + ")");

    int attempts = 0;
    for (;;) {
      const auto r = transport.receive(options.retry_timeout);
      if (r.status == Transport::RecvStatus::Timeout) {
        if (++attempts > options.max_retries) {
          throw PeerUnreachableError(
              "no response to READY for epoch " + std::to_string(tx_index) +
              " after " + std::to_string(attempts) + " attempts");
        }
        // Retransmit the unacknowledged prefix: the HELLO rides along until
        // the first response proves the session is established.
        if (!hello_acked) {
          send_message(transport, hello);
          logger.message(log, SessionEvent::Type::Retransmitted, hello);
        }
        send_message(transport, ready);
        logger.message(log, SessionEvent::Type::Retransmitted, ready);
        continue;
      }
      if (r.status == Transport::RecvStatus::Closed) {
        throw PeerUnreachableError("peer endpoint closed mid-session");
      }

      ControlMessage msg;
      try {
        msg = decode_message(r.payload);
      } catch (const ParseError& e) {
        logf(LogLevel::Warn, "rx ignoring undecodable datagram: ", e.what());
        continue;
      }

      if (static_cast<int64_t>(msg.seq) <= last_peer_seq) {
        logger.message(log, SessionEvent::Type::Dropped, msg);  // stale dup
        continue;
      }
      if (msg.kind == MessageKind::AdvanceAck) {
        logger.message(log, SessionEvent::Type::Accepted, msg);
        last_peer_seq = msg.seq;
        hello_acked = true;
        if (msg.tx_index != tx_index + 1) {
          throw ProtocolError("ADVANCE_ACK jumped to index " +
                              std::to_string(msg.tx_index) + " from epoch " +
                              std::to_string(tx_index));
        }
        tx_index = msg.tx_index;
        break;  // next epoch
      }
      if (msg.kind == MessageKind::Quit) {
        logger.message(log, SessionEvent::Type::Accepted, msg);
        last_peer_seq = msg.seq;
        if (record.reports.empty()) {
          throw ProtocolError("QUIT arrived before any receiver pass "
                              "completed (empty record)");
        }
        logger.state(log, "Done");
        transport.close();
        return record;
      }
      logger.message(log, SessionEvent::Type::Dropped, msg);
    }
  }
}

}  // namespace beamsweep
