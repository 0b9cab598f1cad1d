#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "manet/routing/routing.hpp"

namespace manet::routing {

using Route = std::vector<NodeId>;

/// Complete source routes starting at the owning node.
class RouteCache {
 public:
  RouteCache(NodeId self, std::size_t limit) : self_(self), limit_(limit) {}

  /// Stores `route` (must start at self). Routes with a repeated node are
  /// rejected. Returns true if stored.
  bool add(const Route& route);
  /// Shortest cached route to `dest`, as a prefix of some stored route.
  std::optional<Route> find(NodeId dest) const;
  /// Erases every route that uses the link a-b in either direction.
  /// Returns the number of routes removed.
  std::size_t remove_link(NodeId a, NodeId b);

  const std::vector<Route>& routes() const { return routes_; }
  bool empty() const { return routes_.empty(); }

 private:
  NodeId self_;
  std::size_t limit_;
  std::vector<Route> routes_;
};

bool loop_free(const Route& route);

/// DSR with on-path caching only and no promiscuous overhearing.
class DsrAgent final : public RoutingAgent {
 public:
  DsrAgent(RoutingContext& ctx, const RoutingParams& params);

  Protocol protocol() const override { return Protocol::Dsr; }
  void send_data(Packet packet) override;
  void on_receive(const Packet& packet, NodeId from) override;
  void on_tx_failure(const Packet& packet, NodeId next_hop) override;

  const RouteCache& cache() const { return cache_; }
  RouteCache& cache() { return cache_; }

 private:
  struct Discovery {
    std::uint32_t retries = 0;
    sim::EventHandle timer;
  };

  void discover(NodeId dest);
  void send_request(NodeId dest);
  void on_discovery_timeout(NodeId dest);
  void send_along(Packet packet, const Route& route);
  void flush_pending();
  /// Caches the part of `route` reachable from self, both directions.
  void learn(const Route& route);
  void handle_request(const DsrRequest& req, NodeId from);
  void handle_reply(const Packet& packet, const DsrReply& reply);
  void handle_error(const Packet& packet, const DsrError& err);
  void handle_data(const Packet& packet, const SourceRoute& sr);
  std::uint32_t data_header_bits(std::size_t route_len) const;

  RouteCache cache_;
  std::set<std::pair<NodeId, std::uint32_t>> seen_;
  std::map<NodeId, Discovery> discoveries_;
  std::uint32_t request_id_ = 0;
};

}  // namespace manet::routing
