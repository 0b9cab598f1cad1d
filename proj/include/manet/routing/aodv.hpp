#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>

#include "manet/routing/routing.hpp"

namespace manet::routing {

struct AodvRoute {
  NodeId next_hop = 0;
  std::uint32_t seq = 0;
  bool seq_known = false;
  std::uint32_t hops = 0;
  SimTime expiry = 0.0;
  bool valid = false;
  std::set<NodeId> precursors;
};

/// AODV without expanding-ring search or hello messages. Link breaks come
/// from MAC unicast failures.
class AodvAgent final : public RoutingAgent {
 public:
  using RoutingAgent::RoutingAgent;

  Protocol protocol() const override { return Protocol::Aodv; }
  void send_data(Packet packet) override;
  void on_receive(const Packet& packet, NodeId from) override;
  void on_tx_failure(const Packet& packet, NodeId next_hop) override;

  /// Entry for `dest` if one exists (valid or not).
  const AodvRoute* route(NodeId dest) const;
  /// True if the entry for `dest` is valid and not expired.
  bool has_active_route(NodeId dest) const;
  std::uint32_t own_seq() const { return own_seq_; }
  const std::map<NodeId, AodvRoute>& table() const { return routes_; }

 private:
  struct Discovery {
    std::uint32_t retries = 0;
    sim::EventHandle timer;
  };

  AodvRoute* active(NodeId dest);
  void discover(NodeId dest);
  void send_rreq(NodeId dest);
  void on_discovery_timeout(NodeId dest);
  void forward_data(Packet packet, AodvRoute& route);
  void flush_pending(NodeId dest);
  void touch_neighbor(NodeId neighbor);
  /// Installs or refreshes a route if the offer is fresher or shorter.
  AodvRoute& offer(NodeId dest, NodeId next_hop, std::uint32_t seq, bool seq_known, std::uint32_t hops,
                   double lifetime);
  void handle_rreq(const Packet& packet, const AodvRreq& rreq, NodeId from);
  void handle_rrep(const Packet& packet, const AodvRrep& rrep, NodeId from);
  void handle_rerr(const AodvRerr& rerr, NodeId from);
  void handle_data(Packet packet, NodeId from);
  void send_rerr(std::vector<AodvRerr::Unreachable> lost, const std::set<NodeId>& precursors);
  void link_break(NodeId next_hop);

  std::map<NodeId, AodvRoute> routes_;
  std::set<std::pair<NodeId, std::uint32_t>> seen_;
  std::map<NodeId, Discovery> discoveries_;
  std::uint32_t own_seq_ = 0;
  std::uint32_t broadcast_id_ = 0;
};

}  // namespace manet::routing
