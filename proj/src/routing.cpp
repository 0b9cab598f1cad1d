#include "manet/routing/routing.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "manet/routing/aodv.hpp"
#include "manet/routing/dsdv.hpp"
#include "manet/routing/dsr.hpp"

namespace manet::routing {

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::Aodv: return "aodv";
    case Protocol::Dsr: return "dsr";
    case Protocol::Dsdv: return "dsdv";
  }
  return "?";
}

Protocol parse_protocol(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "aodv") return Protocol::Aodv;
  if (s == "dsr") return Protocol::Dsr;
  if (s == "dsdv") return Protocol::Dsdv;
  throw ConfigError("unknown protocol '" + std::string(text) + "'");
}

void RoutingParams::validate() const {
  if (!(active_route_lifetime > 0.0)) throw ConfigError("active route lifetime must be positive");
  if (!(rreq_interval > 0.0)) throw ConfigError("RREQ retry interval must be positive");
  if (pending_limit == 0) throw ConfigError("pending buffer limit must be positive");
  if (!(dsdv_period > 0.0)) throw ConfigError("DSDV period must be positive");
  if (!(dsdv_trigger_interval >= 0.0)) throw ConfigError("DSDV trigger interval must be non-negative");
  if (!(dsdv_startup_jitter >= 0.0)) throw ConfigError("DSDV startup jitter must be non-negative");
  if (!(dsdv_neighbor_timeout > 0.0)) throw ConfigError("DSDV neighbor timeout must be positive");
  if (dsr_cache_limit == 0) throw ConfigError("DSR cache limit must be positive");
  if (sizes.aodv_rreq == 0 || sizes.aodv_rrep == 0 || sizes.aodv_rerr_base == 0 || sizes.dsr_base == 0 ||
      sizes.dsr_error == 0 || sizes.dsdv_base == 0)
    throw ConfigError("control packet sizes must be positive");
}

Packet RoutingAgent::make_control(PacketKind kind, std::uint32_t size_bytes, NodeId destination,
                                  Payload payload) {
  Packet p;
  p.uid = ctx_.next_uid();
  p.layer = LayerClass::RoutingControl;
  p.kind = kind;
  p.size_bits = size_bytes * 8;
  p.origin = ctx_.self();
  p.destination = destination;
  p.created = ctx_.now();
  p.payload = std::move(payload);
  return p;
}

void RoutingAgent::emit_broadcast(Packet packet) {
  if (packet.layer == LayerClass::RoutingControl) ++stats_.control_sent[static_cast<std::size_t>(packet.kind)];
  ctx_.broadcast(std::move(packet));
}

void RoutingAgent::emit_unicast(Packet packet, NodeId next_hop) {
  if (packet.layer == LayerClass::RoutingControl) ++stats_.control_sent[static_cast<std::size_t>(packet.kind)];
  ctx_.unicast(std::move(packet), next_hop);
}

void RoutingAgent::count_received(const Packet& packet) {
  if (packet.layer == LayerClass::RoutingControl)
    ++stats_.control_received[static_cast<std::size_t>(packet.kind)];
}

void RoutingAgent::buffer(Packet packet) {
  if (pending_.size() >= params_.pending_limit) {
    ++stats_.buffer_drops;
    ctx_.drop(pending_.front(), "buffer-full");
    pending_.pop_front();
  }
  pending_.push_back(std::move(packet));
}

std::deque<Packet> RoutingAgent::take_pending(NodeId destination) {
  std::deque<Packet> out;
  std::deque<Packet> keep;
  for (auto& p : pending_) (p.destination == destination ? out : keep).push_back(std::move(p));
  pending_ = std::move(keep);
  return out;
}

void RoutingAgent::drop_pending(NodeId destination, std::string_view reason) {
  for (const auto& p : take_pending(destination)) {
    ++stats_.no_route_drops;
    ctx_.drop(p, reason);
  }
}

bool RoutingAgent::bump_hops(Packet& packet) {
  if (++packet.hops > kMaxHops) {
    ++stats_.ttl_drops;
    ctx_.drop(packet, "ttl");
    return false;
  }
  return true;
}

std::unique_ptr<RoutingAgent> make_agent(Protocol protocol, RoutingContext& ctx, const RoutingParams& params) {
  params.validate();
  switch (protocol) {
    case Protocol::Aodv: return std::make_unique<AodvAgent>(ctx, params);
    case Protocol::Dsr: return std::make_unique<DsrAgent>(ctx, params);
    case Protocol::Dsdv: return std::make_unique<DsdvAgent>(ctx, params);
  }
  throw ConfigError("unknown protocol");
}

}  // namespace manet::routing
