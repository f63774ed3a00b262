// Beam-training control plane: two state machines (transmitter node,
// receiver node) synchronizing codebook indices over datagrams.
//
// Wire format, 7 bytes per datagram:
//   byte 0    kind (0x01 HELLO, 0x02 READY, 0x03 ADVANCE_ACK, 0x04 QUIT)
//   bytes 1-4 seq, big-endian, strictly increasing per sender
//   bytes 5-6 tx_index, big-endian (meaningful on HELLO and ADVANCE_ACK,
//             zero elsewhere)
//
// Reliability is stop-and-wait: the receiver drives the session and
// retransmits its unacknowledged datagrams on timeout; both sides
// deduplicate by sequence number, and the transmitter re-answers duplicates
// with its last response.
#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/baseband.hpp"
#include "core/codebook.hpp"

namespace beamsweep {

enum class MessageKind : uint8_t {
  Hello = 0x01,
  Ready = 0x02,
  AdvanceAck = 0x03,
  Quit = 0x04,
};

const char* to_string(MessageKind kind);

struct ControlMessage {
  MessageKind kind = MessageKind::Hello;
  uint32_t seq = 0;
  uint16_t tx_index = 0;

  bool operator==(const ControlMessage&) const = default;
};

constexpr size_t kWireSize = 7;

std::array<uint8_t, kWireSize> encode_message(const ControlMessage& msg);
ControlMessage decode_message(std::span<const uint8_t> datagram);

// Datagram endpoint: delivers whole datagrams or nothing.
class Transport {
 public:
  enum class RecvStatus { Data, Timeout, Closed };
  struct RecvResult {
    RecvStatus status = RecvStatus::Timeout;
    std::vector<uint8_t> payload;
  };

  virtual ~Transport() = default;
  virtual void send(std::span<const uint8_t> datagram) = 0;
  virtual RecvResult receive(std::chrono::milliseconds timeout) = 0;
  virtual void close() = 0;
};

// A pair of connected in-memory endpoints. Each direction drops datagrams
// independently with the given probability, deterministically per seed.
struct MemoryLinkOptions {
  double drop_probability = 0.0;
  uint64_t seed = 0;
};
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>>
make_memory_link(const MemoryLinkOptions& options = {});

// IPv4 UDP endpoint. bind/peer addresses are "host:port"; binding to port 0
// picks an ephemeral port (see local_port()).
class UdpTransport : public Transport {
 public:
  explicit UdpTransport(const std::string& bind_addr);
  ~UdpTransport() override;
  UdpTransport(const UdpTransport&) = delete;
  UdpTransport& operator=(const UdpTransport&) = delete;

  void set_peer(const std::string& peer_addr);
  uint16_t local_port() const;

  void send(std::span<const uint8_t> datagram) override;
  RecvResult receive(std::chrono::milliseconds timeout) override;
  void close() override;

 private:
  int fd_ = -1;
  bool peer_set_ = false;
};

struct ProtocolOptions {
  std::chrono::milliseconds retry_timeout{200};
  int max_retries = 10;
};

// Session log: every datagram sent, accepted, retransmitted or dropped,
// plus state transitions, in order.
struct SessionEvent {
  enum class Type { Sent, Accepted, Dropped, Retransmitted, State };
  Type type = Type::State;
  ControlMessage msg{};
  std::string state;
};

struct SessionLog {
  std::vector<SessionEvent> events;

  int count(SessionEvent::Type type, MessageKind kind) const;
  std::vector<ControlMessage> accepted() const;
};

// Everything the receiver knows after a sweep: the tx-major grid of EVM
// reports plus its session log.
struct SweepRecord {
  uint16_t num_tx = 0;
  uint16_t num_rx = 0;
  std::vector<EvmReport> reports;  // row-major: reports[tx * num_rx + rx]
  SessionLog log;

  const EvmReport& at(uint16_t tx, uint16_t rx) const {
    return reports[static_cast<size_t>(tx) * num_rx + rx];
  }
};

// Programs weight vector F[tx_index] into the (simulated) array hardware.
using ProgramWeightsFn = std::function<void(uint16_t tx_index)>;

// Measures one precoder/combiner pair and returns its EVM report.
using MeasureFn = std::function<EvmReport(uint16_t tx_index,
                                          uint16_t rx_index)>;

// Walks the transmit codebook in order: programs each entry, waits for the
// receiver's READY, then advances (or quits after the last entry). As the
// responding side it tolerates 15 retransmission budgets of silence (the
// receiver may be measuring a whole codebook pass) before declaring the
// peer unreachable.
SessionLog run_transmitter(const Codebook& codebook_f, Transport& transport,
                           const ProgramWeightsFn& program_weights,
                           const ProtocolOptions& options = {});

// Drives the sweep: measures every receive entry for the current transmit
// epoch, sends READY, and follows ADVANCE_ACK/QUIT until done.
SweepRecord run_receiver(const Codebook& codebook_w, Transport& transport,
                         const MeasureFn& measure,
                         const ProtocolOptions& options = {});

}  // namespace beamsweep
