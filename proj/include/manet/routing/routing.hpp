#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <string_view>

#include "manet/packet.hpp"
#include "manet/sim/engine.hpp"
#include "manet/sim/random.hpp"

namespace manet::routing {

enum class Protocol { Aodv, Dsr, Dsdv };

std::string_view to_string(Protocol p);
/// Accepts "aodv", "dsr", "dsdv" (any case).
Protocol parse_protocol(std::string_view text);

/// Control packet sizes in bytes.
struct ControlSizes {
  std::uint32_t aodv_rreq = 24;
  std::uint32_t aodv_rrep = 20;
  std::uint32_t aodv_rerr_base = 12;
  std::uint32_t aodv_rerr_per_dest = 8;
  std::uint32_t dsr_base = 16;
  std::uint32_t dsr_per_node = 4;
  std::uint32_t dsr_error = 24;
  /// Source-route header on DSR data packets: base + per_node * route length.
  std::uint32_t dsr_data_base = 4;
  std::uint32_t dsr_data_per_node = 4;
  std::uint32_t dsdv_base = 12;
  std::uint32_t dsdv_per_entry = 12;
};

struct RoutingParams {
  ControlSizes sizes;
  double active_route_lifetime = 10.0;
  std::uint32_t rreq_retries = 3;
  double rreq_interval = 1.0;
  std::size_t pending_limit = 64;
  double dsdv_period = 15.0;
  double dsdv_trigger_interval = 1.0;
  double dsdv_startup_jitter = 2.0;
  double dsdv_neighbor_timeout = 45.0;
  std::size_t dsr_cache_limit = 64;

  void validate() const;
};

struct RoutingStats {
  std::array<std::uint64_t, 8> control_sent{};      // indexed by PacketKind
  std::array<std::uint64_t, 8> control_received{};
  std::uint64_t data_originated = 0;
  std::uint64_t data_delivered = 0;
  std::uint64_t data_forwarded = 0;
  std::uint64_t buffer_drops = 0;
  std::uint64_t no_route_drops = 0;
  std::uint64_t discovery_failures = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t stale_replies = 0;
  std::uint64_t ttl_drops = 0;
  std::uint64_t malformed = 0;

  std::uint64_t sent(PacketKind k) const { return control_sent[static_cast<std::size_t>(k)]; }
  std::uint64_t received(PacketKind k) const { return control_received[static_cast<std::size_t>(k)]; }
};

/// What an agent may do to the outside world.
class RoutingContext {
 public:
  virtual ~RoutingContext() = default;

  virtual NodeId self() const = 0;
  virtual SimTime now() const = 0;
  virtual void broadcast(Packet packet) = 0;
  virtual void unicast(Packet packet, NodeId next_hop) = 0;
  /// Final delivery of a data packet at its destination.
  virtual void deliver(const Packet& packet) = 0;
  virtual void drop(const Packet& packet, std::string_view reason) = 0;
  virtual sim::EventHandle set_timer(SimTime delay, std::string_view kind, std::function<void()> fn) = 0;
  virtual void cancel_timer(sim::EventHandle handle) = 0;
  virtual sim::RandomStream& rng() = 0;
  virtual std::uint64_t next_uid() = 0;
};

class RoutingAgent {
 public:
  RoutingAgent(RoutingContext& ctx, const RoutingParams& params) : ctx_(ctx), params_(params) {}
  virtual ~RoutingAgent() = default;

  RoutingAgent(const RoutingAgent&) = delete;
  RoutingAgent& operator=(const RoutingAgent&) = delete;

  virtual Protocol protocol() const = 0;
  virtual void start() {}
  /// A data packet handed down by the application at its origin.
  virtual void send_data(Packet packet) = 0;
  virtual void on_receive(const Packet& packet, NodeId from) = 0;
  /// The MAC gave up delivering `packet` to `next_hop`.
  virtual void on_tx_failure(const Packet& packet, NodeId next_hop) = 0;

  const RoutingStats& stats() const { return stats_; }
  std::size_t pending() const { return pending_.size(); }

 protected:
  Packet make_control(PacketKind kind, std::uint32_t size_bytes, NodeId destination, Payload payload);
  void emit_broadcast(Packet packet);
  void emit_unicast(Packet packet, NodeId next_hop);
  void count_received(const Packet& packet);

  /// Adds to the pending buffer, dropping the oldest entry when full.
  void buffer(Packet packet);
  /// Removes and returns buffered packets for `destination`, in arrival order.
  std::deque<Packet> take_pending(NodeId destination);
  void drop_pending(NodeId destination, std::string_view reason);
  /// Increments the hop count; false (and the packet dropped) past kMaxHops.
  bool bump_hops(Packet& packet);

  RoutingContext& ctx_;
  RoutingParams params_;
  RoutingStats stats_;
  std::deque<Packet> pending_;
};

std::unique_ptr<RoutingAgent> make_agent(Protocol protocol, RoutingContext& ctx, const RoutingParams& params);

}  // namespace manet::routing
