#include "manet/routing/dsdv.hpp"

#include <algorithm>
#include <vector>

namespace manet::routing {

DsdvAgent::DsdvAgent(RoutingContext& ctx, const RoutingParams& params) : RoutingAgent(ctx, params) {
  table_[ctx.self()] = DsdvEntry{ctx.self(), 0, own_seq_, false};
}

void DsdvAgent::start() {
  schedule_periodic(ctx_.rng().uniform(0.0, params_.dsdv_startup_jitter));
}

void DsdvAgent::schedule_periodic(double delay) {
  periodic_timer_ = ctx_.set_timer(delay, "dsdv-periodic", [this] {
    periodic_update();
    schedule_periodic(params_.dsdv_period);
  });
}

Packet DsdvAgent::make_update(bool full) {
  DsdvUpdate u;
  u.full_dump = full;
  for (auto& [dest, e] : table_) {
    if (!full && !e.changed) continue;
    u.entries.push_back({dest, e.metric, e.seq});
    e.changed = false;
  }
  const auto size =
      params_.sizes.dsdv_base + params_.sizes.dsdv_per_entry * static_cast<std::uint32_t>(u.entries.size());
  return make_control(PacketKind::DsdvUpdate, size, kBroadcast, std::move(u));
}

void DsdvAgent::periodic_update() {
  check_neighbors();
  own_seq_ += 2;
  DsdvEntry& me = table_[ctx_.self()];
  me.seq = own_seq_;
  me.metric = 0;
  me.next_hop = ctx_.self();
  ++periodic_count_;
  emit_broadcast(make_update(true));
}

void DsdvAgent::request_trigger() {
  if (trigger_pending_) return;
  trigger_pending_ = true;
  const double delay = std::max(0.0, last_trigger_ + params_.dsdv_trigger_interval - ctx_.now());
  ctx_.set_timer(delay, "dsdv-trigger", [this] { send_triggered(); });
}

void DsdvAgent::send_triggered() {
  trigger_pending_ = false;
  const bool any = std::any_of(table_.begin(), table_.end(), [](const auto& kv) { return kv.second.changed; });
  if (!any) return;
  last_trigger_ = ctx_.now();
  emit_broadcast(make_update(false));
}

std::size_t DsdvAgent::apply_update(const DsdvUpdate& update, NodeId from) {
  const NodeId self = ctx_.self();
  last_heard_[from] = ctx_.now();
  std::size_t changed = 0;
  for (const auto& adv : update.entries) {
    if (adv.destination == self) {
      if (adv.metric == kInfiniteMetric && adv.seq >= own_seq_) {
        own_seq_ = adv.seq % 2 == 1 ? adv.seq + 1 : adv.seq + 2;
        DsdvEntry& me = table_[self];
        me.seq = own_seq_;
        me.changed = true;
        ++changed;
      }
      continue;
    }
    const std::uint32_t metric = adv.metric == kInfiniteMetric ? kInfiniteMetric : adv.metric + 1;
    auto it = table_.find(adv.destination);
    if (it == table_.end()) {
      if (metric == kInfiniteMetric) continue;
      table_[adv.destination] = DsdvEntry{from, metric, adv.seq, true};
      ++changed;
      continue;
    }
    DsdvEntry& e = it->second;
    const bool adopt = adv.seq > e.seq || (adv.seq == e.seq && metric < e.metric);
    if (!adopt) continue;
    const bool differs = metric != e.metric;
    e.seq = adv.seq;
    e.metric = metric;
    if (metric != kInfiniteMetric) e.next_hop = from;
    if (differs) {
      e.changed = true;
      ++changed;
    }
  }
  if (changed > 0) {
    request_trigger();
    flush_pending();
  }
  return changed;
}

void DsdvAgent::link_break(NodeId next_hop) {
  last_heard_.erase(next_hop);
  bool any = false;
  for (auto& [dest, e] : table_) {
    if (dest == ctx_.self() || e.next_hop != next_hop || !e.reachable()) continue;
    e.metric = kInfiniteMetric;
    e.seq += 1;
    e.changed = true;
    any = true;
  }
  if (any) request_trigger();
}

void DsdvAgent::check_neighbors() {
  std::vector<NodeId> lost;
  for (const auto& [n, t] : last_heard_)
    if (ctx_.now() - t > params_.dsdv_neighbor_timeout) lost.push_back(n);
  for (NodeId n : lost) link_break(n);
}

void DsdvAgent::flush_pending() {
  std::deque<Packet> all = std::move(pending_);
  pending_.clear();
  for (auto& p : all) {
    auto it = table_.find(p.destination);
    if (it != table_.end() && it->second.reachable())
      emit_unicast(std::move(p), it->second.next_hop);
    else
      pending_.push_back(std::move(p));
  }
}

void DsdvAgent::send_data(Packet packet) {
  ++stats_.data_originated;
  if (packet.destination == ctx_.self()) {
    ++stats_.data_delivered;
    ctx_.deliver(packet);
    return;
  }
  auto it = table_.find(packet.destination);
  if (it != table_.end() && it->second.reachable()) {
    emit_unicast(std::move(packet), it->second.next_hop);
    return;
  }
  buffer(std::move(packet));
}

void DsdvAgent::on_receive(const Packet& packet, NodeId from) {
  count_received(packet);
  if (const auto* u = std::get_if<DsdvUpdate>(&packet.payload)) {
    apply_update(*u, from);
    return;
  }
  if (packet.kind != PacketKind::Data) {
    ++stats_.malformed;
    ctx_.drop(packet, "malformed");
    return;
  }
  last_heard_[from] = ctx_.now();
  if (packet.destination == ctx_.self()) {
    ++stats_.data_delivered;
    ctx_.deliver(packet);
    return;
  }
  auto it = table_.find(packet.destination);
  if (it == table_.end() || !it->second.reachable()) {
    ++stats_.no_route_drops;
    ctx_.drop(packet, "no-route");
    return;
  }
  Packet out = packet;
  if (!bump_hops(out)) return;
  ++stats_.data_forwarded;
  emit_unicast(std::move(out), it->second.next_hop);
}

void DsdvAgent::on_tx_failure(const Packet& packet, NodeId next_hop) {
  link_break(next_hop);
  if (packet.kind == PacketKind::Data && packet.origin == ctx_.self()) {
    buffer(packet);
    return;
  }
  if (packet.kind == PacketKind::Data) ++stats_.no_route_drops;
  ctx_.drop(packet, "link-break");
}

}  // namespace manet::routing
