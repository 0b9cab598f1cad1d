#include "manet/routing/aodv.hpp"

#include <algorithm>

namespace manet::routing {

const AodvRoute* AodvAgent::route(NodeId dest) const {
  auto it = routes_.find(dest);
  return it == routes_.end() ? nullptr : &it->second;
}

bool AodvAgent::has_active_route(NodeId dest) const {
  const AodvRoute* r = route(dest);
  return r != nullptr && r->valid && r->expiry > ctx_.now();
}

AodvRoute* AodvAgent::active(NodeId dest) {
  auto it = routes_.find(dest);
  if (it == routes_.end() || !it->second.valid) return nullptr;
  if (it->second.expiry <= ctx_.now()) {
    it->second.valid = false;  // silent expiry
    return nullptr;
  }
  return &it->second;
}

void AodvAgent::touch_neighbor(NodeId neighbor) {
  AodvRoute& r = routes_[neighbor];
  const SimTime until = ctx_.now() + params_.active_route_lifetime;
  if (r.valid && r.expiry > ctx_.now() && r.next_hop == neighbor && r.hops == 1) {
    r.expiry = std::max(r.expiry, until);
    return;
  }
  r.next_hop = neighbor;
  r.hops = 1;
  r.valid = true;
  r.expiry = until;
}

AodvRoute& AodvAgent::offer(NodeId dest, NodeId next_hop, std::uint32_t seq, bool seq_known,
                            std::uint32_t hops, double lifetime) {
  AodvRoute* current = active(dest);
  AodvRoute& r = routes_[dest];
  const bool accept = current == nullptr || !r.seq_known ||
                      (seq_known && (seq > r.seq || (seq == r.seq && hops < r.hops)));
  if (!accept) return r;
  const SimTime until = ctx_.now() + lifetime;
  r.expiry = current != nullptr ? std::max(r.expiry, until) : until;
  r.next_hop = next_hop;
  r.hops = hops;
  r.valid = true;
  if (seq_known) {
    r.seq = seq;
    r.seq_known = true;
  }
  return r;
}

void AodvAgent::send_data(Packet packet) {
  ++stats_.data_originated;
  if (packet.destination == ctx_.self()) {
    ++stats_.data_delivered;
    ctx_.deliver(packet);
    return;
  }
  if (AodvRoute* r = active(packet.destination)) {
    forward_data(std::move(packet), *r);
    return;
  }
  const NodeId dest = packet.destination;
  buffer(std::move(packet));
  discover(dest);
}

void AodvAgent::forward_data(Packet packet, AodvRoute& route) {
  route.expiry = std::max(route.expiry, ctx_.now() + params_.active_route_lifetime);
  const NodeId hop = route.next_hop;
  if (AodvRoute* n = active(hop)) n->expiry = std::max(n->expiry, ctx_.now() + params_.active_route_lifetime);
  emit_unicast(std::move(packet), hop);
}

void AodvAgent::discover(NodeId dest) {
  if (discoveries_.contains(dest)) return;
  Discovery& d = discoveries_[dest];
  send_rreq(dest);
  d.timer = ctx_.set_timer(params_.rreq_interval, "aodv-rreq-timeout", [this, dest] { on_discovery_timeout(dest); });
}

void AodvAgent::send_rreq(NodeId dest) {
  ++own_seq_;
  AodvRreq q;
  q.broadcast_id = ++broadcast_id_;
  q.source = ctx_.self();
  q.source_seq = own_seq_;
  q.destination = dest;
  if (auto it = routes_.find(dest); it != routes_.end() && it->second.seq_known) {
    q.destination_seq = it->second.seq;
    q.destination_seq_known = true;
  }
  seen_.insert({q.source, q.broadcast_id});
  emit_broadcast(make_control(PacketKind::AodvRreq, params_.sizes.aodv_rreq, kBroadcast, q));
}

void AodvAgent::on_discovery_timeout(NodeId dest) {
  auto it = discoveries_.find(dest);
  if (it == discoveries_.end()) return;
  if (active(dest) != nullptr) {
    discoveries_.erase(it);
    flush_pending(dest);
    return;
  }
  if (it->second.retries < params_.rreq_retries) {
    ++it->second.retries;
    send_rreq(dest);
    it->second.timer =
        ctx_.set_timer(params_.rreq_interval, "aodv-rreq-timeout", [this, dest] { on_discovery_timeout(dest); });
    return;
  }
  discoveries_.erase(it);
  ++stats_.discovery_failures;
  drop_pending(dest, "no-route");
}

void AodvAgent::flush_pending(NodeId dest) {
  for (auto& p : take_pending(dest)) {
    if (AodvRoute* r = active(dest))
      forward_data(std::move(p), *r);
    else
      buffer(std::move(p));
  }
}

void AodvAgent::on_receive(const Packet& packet, NodeId from) {
  count_received(packet);
  if (packet.kind == PacketKind::Data) {
    handle_data(packet, from);
    return;
  }
  if (const auto* q = std::get_if<AodvRreq>(&packet.payload))
    handle_rreq(packet, *q, from);
  else if (const auto* p = std::get_if<AodvRrep>(&packet.payload))
    handle_rrep(packet, *p, from);
  else if (const auto* e = std::get_if<AodvRerr>(&packet.payload))
    handle_rerr(*e, from);
  else {
    ++stats_.malformed;
    ctx_.drop(packet, "malformed");
  }
}

void AodvAgent::handle_rreq(const Packet& packet, const AodvRreq& rreq, NodeId from) {
  const NodeId self = ctx_.self();
  if (rreq.source == self || !seen_.insert({rreq.source, rreq.broadcast_id}).second) {
    ++stats_.duplicates;
    ctx_.drop(packet, "duplicate");
    return;
  }
  touch_neighbor(from);
  AodvRoute& rev = offer(rreq.source, from, rreq.source_seq, true, rreq.hop_count + 1,
                         params_.active_route_lifetime);

  if (rreq.destination == self) {
    if (rreq.destination_seq_known && rreq.destination_seq > own_seq_) own_seq_ = rreq.destination_seq;
    AodvRrep rep{rreq.source, self, own_seq_, 0, params_.active_route_lifetime};
    emit_unicast(make_control(PacketKind::AodvRrep, params_.sizes.aodv_rrep, rreq.source, rep), rev.next_hop);
    return;
  }

  AodvRoute* known = active(rreq.destination);
  if (known != nullptr && known->seq_known &&
      (!rreq.destination_seq_known || known->seq >= rreq.destination_seq)) {
    AodvRrep rep{rreq.source, rreq.destination, known->seq, known->hops, known->expiry - ctx_.now()};
    known->precursors.insert(rev.next_hop);
    rev.precursors.insert(known->next_hop);
    emit_unicast(make_control(PacketKind::AodvRrep, params_.sizes.aodv_rrep, rreq.source, rep), rev.next_hop);
    return;
  }

  AodvRreq fwd = rreq;
  fwd.hop_count += 1;
  if (auto it = routes_.find(rreq.destination); it != routes_.end() && it->second.seq_known &&
                                                 (!fwd.destination_seq_known || it->second.seq > fwd.destination_seq)) {
    fwd.destination_seq = it->second.seq;
    fwd.destination_seq_known = true;
  }
  Packet out = packet;
  out.payload = fwd;
  if (!bump_hops(out)) return;
  emit_broadcast(std::move(out));
}

void AodvAgent::handle_rrep(const Packet& packet, const AodvRrep& rrep, NodeId from) {
  touch_neighbor(from);
  const double lifetime = rrep.lifetime > 0.0 ? rrep.lifetime : params_.active_route_lifetime;
  AodvRoute& fwd = offer(rrep.destination, from, rrep.destination_seq, true, rrep.hop_count + 1, lifetime);

  if (rrep.origin == ctx_.self()) {
    if (auto it = discoveries_.find(rrep.destination); it != discoveries_.end()) {
      ctx_.cancel_timer(it->second.timer);
      discoveries_.erase(it);
    }
    flush_pending(rrep.destination);
    return;
  }

  AodvRoute* rev = active(rrep.origin);
  if (rev == nullptr) {
    ++stats_.stale_replies;
    ctx_.drop(packet, "no-reverse-route");
    return;
  }
  fwd.precursors.insert(rev->next_hop);
  rev->precursors.insert(from);
  rev->expiry = std::max(rev->expiry, ctx_.now() + params_.active_route_lifetime);

  AodvRrep next = rrep;
  next.hop_count += 1;
  Packet out = packet;
  out.payload = next;
  if (!bump_hops(out)) return;
  emit_unicast(std::move(out), rev->next_hop);
}

void AodvAgent::handle_data(Packet packet, NodeId from) {
  touch_neighbor(from);
  if (packet.destination == ctx_.self()) {
    ++stats_.data_delivered;
    ctx_.deliver(packet);
    return;
  }
  if (!bump_hops(packet)) return;
  if (AodvRoute* r = active(packet.destination)) {
    if (AodvRoute* o = active(packet.origin))
      o->expiry = std::max(o->expiry, ctx_.now() + params_.active_route_lifetime);
    ++stats_.data_forwarded;
    forward_data(std::move(packet), *r);
    return;
  }
  ++stats_.no_route_drops;
  ctx_.drop(packet, "no-route");
  std::uint32_t seq = 0;
  if (auto it = routes_.find(packet.destination); it != routes_.end() && it->second.seq_known)
    seq = it->second.seq + 1;
  send_rerr({{packet.destination, seq}}, {from});
}

void AodvAgent::send_rerr(std::vector<AodvRerr::Unreachable> lost, const std::set<NodeId>& precursors) {
  if (lost.empty() || precursors.empty()) return;
  const auto size = params_.sizes.aodv_rerr_base + params_.sizes.aodv_rerr_per_dest * static_cast<std::uint32_t>(lost.size());
  AodvRerr e{std::move(lost)};
  if (precursors.size() == 1) {
    const NodeId to = *precursors.begin();
    emit_unicast(make_control(PacketKind::AodvRerr, size, to, std::move(e)), to);
  } else {
    emit_broadcast(make_control(PacketKind::AodvRerr, size, kBroadcast, std::move(e)));
  }
}

void AodvAgent::link_break(NodeId next_hop) {
  std::vector<AodvRerr::Unreachable> lost;
  std::set<NodeId> precursors;
  for (auto& [dest, r] : routes_) {
    if (!r.valid || r.next_hop != next_hop) continue;
    const bool was_active = r.expiry > ctx_.now();
    r.valid = false;
    if (r.seq_known) ++r.seq;
    if (!was_active) continue;
    lost.push_back({dest, r.seq});
    precursors.insert(r.precursors.begin(), r.precursors.end());
  }
  precursors.erase(next_hop);
  precursors.erase(ctx_.self());
  send_rerr(std::move(lost), precursors);
}

void AodvAgent::handle_rerr(const AodvRerr& rerr, NodeId from) {
  std::vector<AodvRerr::Unreachable> lost;
  std::set<NodeId> precursors;
  for (const auto& u : rerr.destinations) {
    auto it = routes_.find(u.destination);
    if (it == routes_.end()) continue;
    AodvRoute& r = it->second;
    if (!r.valid || r.next_hop != from) continue;
    const bool was_active = r.expiry > ctx_.now();
    r.valid = false;
    r.seq = std::max(r.seq, u.seq);
    if (!was_active) continue;
    lost.push_back({u.destination, r.seq});
    precursors.insert(r.precursors.begin(), r.precursors.end());
  }
  precursors.erase(from);
  precursors.erase(ctx_.self());
  send_rerr(std::move(lost), precursors);
}

void AodvAgent::on_tx_failure(const Packet& packet, NodeId next_hop) {
  link_break(next_hop);
  if (packet.kind == PacketKind::Data && packet.origin == ctx_.self()) {
    const NodeId dest = packet.destination;
    buffer(packet);
    discover(dest);
    return;
  }
  if (packet.kind == PacketKind::Data) ++stats_.no_route_drops;
  ctx_.drop(packet, "link-break");
}

}  // namespace manet::routing
