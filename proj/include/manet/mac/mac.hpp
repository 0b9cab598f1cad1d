#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "manet/energy/energy.hpp"
#include "manet/mobility/mobility.hpp"
#include "manet/packet.hpp"
#include "manet/sim/engine.hpp"
#include "manet/sim/random.hpp"

namespace manet::mac {

struct ChannelModel {
  double bit_rate = 2e6;     // bits/s
  double tx_range = 250.0;   // m
  double cs_range = 250.0;   // m

  void validate() const;
};

/// Simplified DCF timing and frame sizes.
struct MacParams {
  double slot = 20e-6;
  double difs = 50e-6;
  double sifs = 10e-6;
  std::uint32_t cw_slots = 32;
  std::uint32_t retry_limit = 4;
  /// Unicast DATA frames larger than this use RTS/CTS. Infinity disables it.
  double rts_threshold_bits = 0.0;
  std::size_t queue_limit = 50;
  std::uint32_t rts_bits = 352;
  std::uint32_t cts_bits = 304;
  std::uint32_t ack_bits = 304;
  std::uint32_t data_header_bits = 272;

  void validate() const;
};

enum class FrameKind : std::uint8_t { Rts, Cts, Ack, DataUnicast, DataBroadcast };

std::string_view to_string(FrameKind kind);

/// Bits a frame of this kind adds on air: the whole frame for RTS/CTS/ACK,
/// the MAC header for DATA.
std::uint32_t frame_overhead(FrameKind kind, const MacParams& params);

struct Frame {
  FrameKind kind = FrameKind::DataBroadcast;
  std::shared_ptr<const Packet> packet;  // DATA frames only
  std::uint32_t size_bits = 0;
  NodeId transmitter = 0;
  NodeId receiver = kBroadcast;
  /// Medium reservation announced to overhearing nodes, counted from the
  /// end of this frame.
  double nav = 0.0;
  std::uint64_t mac_seq = 0;

  LayerClass layer() const;
};

struct Transmission {
  std::uint64_t id = 0;
  Frame frame;
  SimTime start = 0.0;
  SimTime end = 0.0;
};

// --- pure interference model ---------------------------------------------

enum class RxOutcome { Received, Collided, OutOfRange };

struct PlannedTransmission {
  mobility::Vec2 position;
  SimTime start;
  SimTime end;
};

/// outcome[r][t] for receiver r and transmission t. A receiver in range of
/// two temporally overlapping transmissions loses both (no capture).
std::vector<std::vector<RxOutcome>> resolve_receptions(const ChannelModel& model,
                                                       std::span<const PlannedTransmission> txs,
                                                       std::span<const mobility::Vec2> receivers);

// --- live channel ----------------------------------------------------------

class Mac;

/// Unit-disk broadcast medium shared by all MACs of one scenario.
class Channel {
 public:
  using PositionFn = std::function<mobility::Vec2(NodeId, SimTime)>;

  Channel(sim::Engine& engine, const ChannelModel& model, std::size_t node_count, PositionFn positions);

  void attach(NodeId node, Mac& mac);
  void detach(NodeId node);
  bool attached(NodeId node) const { return node < macs_.size() && macs_[node] != nullptr; }

  /// Starts transmitting `frame` now from frame.transmitter.
  void transmit(Frame frame);

  double airtime(std::uint32_t bits) const { return static_cast<double>(bits) / model_.bit_rate; }
  const ChannelModel& model() const { return model_; }
  std::uint64_t transmissions() const { return next_id_ - 1; }

 private:
  sim::Engine& engine_;
  ChannelModel model_;
  PositionFn positions_;
  std::vector<Mac*> macs_;
  std::uint64_t next_id_ = 1;
};

struct MacStats {
  std::uint64_t tx_rts = 0;
  std::uint64_t tx_cts = 0;
  std::uint64_t tx_ack = 0;
  std::uint64_t tx_data_unicast = 0;
  std::uint64_t tx_data_broadcast = 0;
  std::uint64_t rx_ok = 0;
  std::uint64_t rx_collided = 0;
  std::uint64_t delivered_unicast = 0;
  std::uint64_t delivered_broadcast = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t acks_received = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t unicast_failures = 0;
  std::uint64_t queue_drops = 0;
  std::uint64_t overlap_violations = 0;
  std::uint64_t tx_reports = 0;
  std::uint64_t rx_reports = 0;

  std::uint64_t mac_control_tx() const { return tx_rts + tx_cts + tx_ack; }
};

/// Per-node DCF: carrier sense with NAV, fixed-window random backoff,
/// RTS/CTS/DATA/ACK for unicast and plain DATA for broadcast.
class Mac {
 public:
  using PacketPtr = std::shared_ptr<const Packet>;

  struct Callbacks {
    std::function<void(const PacketPtr&, NodeId from)> receive;
    std::function<void(const PacketPtr&, NodeId next_hop)> unicast_failed;
    /// Called for every energy charge the MAC makes (tx or rx of a frame).
    std::function<void(const Frame&, energy::Direction)> energy_report;
  };

  Mac(NodeId self, sim::Engine& engine, Channel& channel, const MacParams& params,
      sim::RandomStream rng, energy::Radio* radio);

  Mac(const Mac&) = delete;
  Mac& operator=(const Mac&) = delete;

  void set_callbacks(Callbacks callbacks) { callbacks_ = std::move(callbacks); }

  /// Queues a packet for `next_hop` (kBroadcast to broadcast). Returns false
  /// if the queue is full or the MAC is shut down.
  bool send(PacketPtr packet, NodeId next_hop);

  /// Removes queued unicast packets for `next_hop` that are not in service.
  std::vector<PacketPtr> purge(NodeId next_hop);

  /// Stops all activity (node death).
  void shutdown();
  bool down() const { return phase_ == Phase::Dead; }

  void on_rx_start(const std::shared_ptr<const Transmission>& tx, bool decodable);
  void on_rx_end(const std::shared_ptr<const Transmission>& tx);
  void on_tx_end(const std::shared_ptr<const Transmission>& tx);

  NodeId self() const { return self_; }
  const MacStats& stats() const { return stats_; }
  std::size_t queue_length() const { return queue_.size(); }
  bool medium_busy() const;

 private:
  enum class Phase { Idle, Contend, AwaitTx, WaitCts, WaitAck, Responding, Dead };

  struct Outgoing {
    PacketPtr packet;
    NodeId next_hop;
    std::uint32_t retries = 0;
    std::uint64_t mac_seq = 0;
  };

  struct Incoming {
    std::uint64_t tx_id;
    bool decodable;
    bool corrupt;
    bool charged;
  };

  void start_contention();
  void resume_countdown();
  void pause_countdown();
  void on_access();
  void medium_became_idle();
  void set_nav(SimTime until);
  void transmit(Frame frame);
  void handle_frame(const Frame& frame);
  void respond(Frame frame);
  void send_data_frame();
  void on_timeout();
  void retry_or_fail();
  void finish_head();
  std::uint32_t data_frame_bits(const Outgoing& o) const;
  double airtime(std::uint32_t bits) const { return channel_.airtime(bits); }

  NodeId self_;
  sim::Engine& engine_;
  Channel& channel_;
  MacParams params_;
  sim::RandomStream rng_;
  energy::Radio* radio_;
  Callbacks callbacks_;
  MacStats stats_;

  Phase phase_ = Phase::Idle;
  std::deque<Outgoing> queue_;
  std::vector<Incoming> incoming_;
  int sensed_ = 0;
  bool transmitting_ = false;
  SimTime nav_until_ = 0.0;
  int backoff_slots_ = -1;
  SimTime countdown_start_ = 0.0;
  sim::EventHandle access_event_;
  sim::EventHandle timeout_event_;
  sim::EventHandle nav_event_;
  std::uint64_t next_mac_seq_ = 1;
  std::unordered_map<NodeId, std::uint64_t> last_seq_from_;
};

}  // namespace manet::mac
