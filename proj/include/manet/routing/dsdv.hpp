#pragma once

#include <map>

#include "manet/routing/routing.hpp"

namespace manet::routing {

struct DsdvEntry {
  NodeId next_hop = 0;
  std::uint32_t metric = kInfiniteMetric;
  std::uint32_t seq = 0;
  bool changed = false;

  bool reachable() const { return metric != kInfiniteMetric; }
};

/// DSDV with periodic full dumps, rate-limited triggered updates and no
/// settling-time damping.
class DsdvAgent final : public RoutingAgent {
 public:
  DsdvAgent(RoutingContext& ctx, const RoutingParams& params);

  Protocol protocol() const override { return Protocol::Dsdv; }
  void start() override;
  void send_data(Packet packet) override;
  void on_receive(const Packet& packet, NodeId from) override;
  void on_tx_failure(const Packet& packet, NodeId next_hop) override;

  /// Broadcasts a full dump now (the periodic timer calls this).
  void periodic_update();
  /// Applies one update as if received from `from`. Returns the number of
  /// entries that changed.
  std::size_t apply_update(const DsdvUpdate& update, NodeId from);
  void link_break(NodeId next_hop);

  const std::map<NodeId, DsdvEntry>& table() const { return table_; }
  std::uint32_t own_seq() const { return own_seq_; }
  std::uint64_t periodic_count() const { return periodic_count_; }

 private:
  void schedule_periodic(double delay);
  void request_trigger();
  void send_triggered();
  void check_neighbors();
  void flush_pending();
  Packet make_update(bool full);

  std::map<NodeId, DsdvEntry> table_;
  std::map<NodeId, SimTime> last_heard_;
  std::uint32_t own_seq_ = 0;
  std::uint64_t periodic_count_ = 0;
  SimTime last_trigger_ = -1e300;
  bool trigger_pending_ = false;
  sim::EventHandle periodic_timer_;
};

}  // namespace manet::routing
