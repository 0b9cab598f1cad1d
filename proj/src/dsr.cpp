#include "manet/routing/dsr.hpp"

#include <algorithm>
#include <unordered_set>

namespace manet::routing {

bool loop_free(const Route& route) {
  std::unordered_set<NodeId> seen;
  for (NodeId n : route)
    if (!seen.insert(n).second) return false;
  return true;
}

namespace {

bool is_prefix(const Route& shorter, const Route& longer) {
  return shorter.size() <= longer.size() && std::equal(shorter.begin(), shorter.end(), longer.begin());
}

bool uses_link(const Route& r, NodeId a, NodeId b) {
  for (std::size_t i = 0; i + 1 < r.size(); ++i)
    if ((r[i] == a && r[i + 1] == b) || (r[i] == b && r[i + 1] == a)) return true;
  return false;
}

}  // namespace

bool RouteCache::add(const Route& route) {
  if (route.size() < 2 || route.front() != self_ || !loop_free(route)) return false;
  for (auto& r : routes_) {
    if (is_prefix(route, r)) return false;
    if (is_prefix(r, route)) {
      r = route;
      return true;
    }
  }
  if (routes_.size() >= limit_) routes_.erase(routes_.begin());
  routes_.push_back(route);
  return true;
}

std::optional<Route> RouteCache::find(NodeId dest) const {
  std::optional<Route> best;
  for (const auto& r : routes_) {
    auto it = std::find(r.begin() + 1, r.end(), dest);
    if (it == r.end()) continue;
    const auto len = static_cast<std::size_t>(it - r.begin()) + 1;
    if (!best || len < best->size()) best = Route(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(len));
  }
  return best;
}

std::size_t RouteCache::remove_link(NodeId a, NodeId b) {
  const auto before = routes_.size();
  std::erase_if(routes_, [&](const Route& r) { return uses_link(r, a, b); });
  return before - routes_.size();
}

DsrAgent::DsrAgent(RoutingContext& ctx, const RoutingParams& params)
    : RoutingAgent(ctx, params), cache_(ctx.self(), params.dsr_cache_limit) {}

std::uint32_t DsrAgent::data_header_bits(std::size_t route_len) const {
  return 8 * (params_.sizes.dsr_data_base + params_.sizes.dsr_data_per_node * static_cast<std::uint32_t>(route_len));
}

void DsrAgent::learn(const Route& route) {
  auto it = std::find(route.begin(), route.end(), ctx_.self());
  if (it == route.end()) return;
  cache_.add(Route(it, route.end()));
  Route back(route.begin(), it + 1);
  std::reverse(back.begin(), back.end());
  cache_.add(back);
}

void DsrAgent::send_data(Packet packet) {
  ++stats_.data_originated;
  if (packet.destination == ctx_.self()) {
    ++stats_.data_delivered;
    ctx_.deliver(packet);
    return;
  }
  if (auto route = cache_.find(packet.destination)) {
    send_along(std::move(packet), *route);
    return;
  }
  const NodeId dest = packet.destination;
  buffer(std::move(packet));
  discover(dest);
}

void DsrAgent::send_along(Packet packet, const Route& route) {
  packet.size_bits = packet.payload_bits + data_header_bits(route.size());
  packet.payload = SourceRoute{route, 1};
  emit_unicast(std::move(packet), route[1]);
}

void DsrAgent::discover(NodeId dest) {
  if (discoveries_.contains(dest)) return;
  Discovery& d = discoveries_[dest];
  send_request(dest);
  d.timer = ctx_.set_timer(params_.rreq_interval, "dsr-request-timeout", [this, dest] { on_discovery_timeout(dest); });
}

void DsrAgent::send_request(NodeId dest) {
  DsrRequest req{++request_id_, ctx_.self(), dest, {ctx_.self()}};
  seen_.insert({req.source, req.request_id});
  const auto size = params_.sizes.dsr_base + params_.sizes.dsr_per_node;
  emit_broadcast(make_control(PacketKind::DsrRequest, size, kBroadcast, std::move(req)));
}

void DsrAgent::on_discovery_timeout(NodeId dest) {
  auto it = discoveries_.find(dest);
  if (it == discoveries_.end()) return;
  if (cache_.find(dest)) {
    discoveries_.erase(it);
    flush_pending();
    return;
  }
  if (it->second.retries < params_.rreq_retries) {
    ++it->second.retries;
    send_request(dest);
    it->second.timer =
        ctx_.set_timer(params_.rreq_interval, "dsr-request-timeout", [this, dest] { on_discovery_timeout(dest); });
    return;
  }
  discoveries_.erase(it);
  ++stats_.discovery_failures;
  drop_pending(dest, "no-route");
}

void DsrAgent::flush_pending() {
  std::deque<Packet> keep;
  std::deque<Packet> all = std::move(pending_);
  pending_.clear();
  for (auto& p : all) {
    if (auto route = cache_.find(p.destination))
      send_along(std::move(p), *route);
    else
      keep.push_back(std::move(p));
  }
  pending_ = std::move(keep);
  for (auto it = discoveries_.begin(); it != discoveries_.end();) {
    if (cache_.find(it->first)) {
      ctx_.cancel_timer(it->second.timer);
      it = discoveries_.erase(it);
    } else {
      ++it;
    }
  }
}

void DsrAgent::on_receive(const Packet& packet, NodeId from) {
  count_received(packet);
  if (const auto* sr = std::get_if<SourceRoute>(&packet.payload))
    handle_data(packet, *sr);
  else if (const auto* q = std::get_if<DsrRequest>(&packet.payload))
    handle_request(*q, from);
  else if (const auto* r = std::get_if<DsrReply>(&packet.payload))
    handle_reply(packet, *r);
  else if (const auto* e = std::get_if<DsrError>(&packet.payload))
    handle_error(packet, *e);
  else {
    ++stats_.malformed;
    ctx_.drop(packet, "malformed");
  }
}

void DsrAgent::handle_request(const DsrRequest& req, NodeId from) {
  (void)from;
  const NodeId self = ctx_.self();
  if (req.source == self || seen_.contains({req.source, req.request_id}) ||
      std::find(req.route.begin(), req.route.end(), self) != req.route.end()) {
    ++stats_.duplicates;
    return;
  }
  seen_.insert({req.source, req.request_id});
  Route full = req.route;
  full.push_back(self);
  learn(full);

  if (req.target == self) {
    Route path(full.rbegin(), full.rend());
    const auto size = params_.sizes.dsr_base + params_.sizes.dsr_per_node * static_cast<std::uint32_t>(full.size());
    const NodeId next = path[1];
    emit_unicast(make_control(PacketKind::DsrReply, size, req.source, DsrReply{full, std::move(path), 1}), next);
    return;
  }
  DsrRequest fwd = req;
  fwd.route = full;
  const auto size = params_.sizes.dsr_base + params_.sizes.dsr_per_node * static_cast<std::uint32_t>(full.size());
  Packet out = make_control(PacketKind::DsrRequest, size, kBroadcast, std::move(fwd));
  out.origin = req.source;
  emit_broadcast(std::move(out));
}

void DsrAgent::handle_reply(const Packet& packet, const DsrReply& reply) {
  if (reply.hop_index >= reply.path.size() || reply.path[reply.hop_index] != ctx_.self()) {
    ++stats_.malformed;
    ctx_.drop(packet, "malformed");
    return;
  }
  learn(reply.route);
  if (reply.hop_index + 1 == reply.path.size()) {
    flush_pending();
    return;
  }
  DsrReply next = reply;
  next.hop_index += 1;
  Packet out = packet;
  out.payload = next;
  if (!bump_hops(out)) return;
  emit_unicast(std::move(out), next.path[next.hop_index]);
}

void DsrAgent::handle_error(const Packet& packet, const DsrError& err) {
  cache_.remove_link(err.link_from, err.link_to);
  if (err.hop_index + 1 >= err.path.size()) return;
  DsrError next = err;
  next.hop_index += 1;
  Packet out = packet;
  out.payload = next;
  if (!bump_hops(out)) return;
  emit_unicast(std::move(out), next.path[next.hop_index]);
}

void DsrAgent::handle_data(const Packet& packet, const SourceRoute& sr) {
  if (sr.hop_index >= sr.route.size() || sr.route[sr.hop_index] != ctx_.self()) {
    ++stats_.malformed;
    ctx_.drop(packet, "malformed");
    return;
  }
  learn(sr.route);
  if (sr.hop_index + 1 == sr.route.size()) {
    ++stats_.data_delivered;
    ctx_.deliver(packet);
    return;
  }
  Packet out = packet;
  if (!bump_hops(out)) return;
  SourceRoute next = sr;
  next.hop_index += 1;
  const NodeId hop = next.route[next.hop_index];
  out.payload = std::move(next);
  ++stats_.data_forwarded;
  emit_unicast(std::move(out), hop);
}

void DsrAgent::on_tx_failure(const Packet& packet, NodeId next_hop) {
  const NodeId self = ctx_.self();
  cache_.remove_link(self, next_hop);
  if (packet.kind != PacketKind::Data) {
    ctx_.drop(packet, "link-break");
    return;
  }
  if (packet.origin == self) {
    Packet p = packet;
    p.size_bits = p.payload_bits;
    p.payload = std::monostate{};
    p.hops = 0;
    if (auto route = cache_.find(p.destination)) {
      send_along(std::move(p), *route);
      return;
    }
    const NodeId dest = p.destination;
    buffer(std::move(p));
    discover(dest);
    return;
  }
  ++stats_.no_route_drops;
  ctx_.drop(packet, "link-break");
  const auto* sr = std::get_if<SourceRoute>(&packet.payload);
  if (sr == nullptr) return;
  auto it = std::find(sr->route.begin(), sr->route.end(), self);
  if (it == sr->route.end()) return;
  Route path(sr->route.begin(), it + 1);
  std::reverse(path.begin(), path.end());
  if (path.size() < 2) return;
  const NodeId to = path[1];
  emit_unicast(make_control(PacketKind::DsrError, params_.sizes.dsr_error, packet.origin,
                            DsrError{self, next_hop, std::move(path), 1}),
               to);
}

}  // namespace manet::routing
