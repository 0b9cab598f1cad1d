#include "manet/harness/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace manet::harness {

double MetricsReport::max_ledger_imbalance() const {
  double m = 0.0;
  for (const auto& n : nodes) m = std::max(m, n.ledger_imbalance);
  return m;
}

double MetricsReport::max_coverage_error() const {
  double m = 0.0;
  for (const auto& n : nodes) m = std::max(m, n.coverage_error);
  return m;
}

MetricsReport compute_metrics(std::span<const DataRecord> records, std::span<const energy::EnergyLedger> ledgers,
                              SimTime duration) {
  MetricsReport r;
  double delay_sum = 0.0;
  double bits = 0.0;
  for (const auto& rec : records) {
    ++r.sent;
    if (!rec.delivered) continue;
    ++r.delivered;
    delay_sum += *rec.delivered - rec.sent;
    bits += rec.payload_bits;
  }
  if (r.sent > 0) r.pdf = static_cast<double>(r.delivered) / static_cast<double>(r.sent);
  if (r.delivered > 0) r.avg_delay = delay_sum / static_cast<double>(r.delivered);
  r.throughput = duration > 0.0 ? bits / duration : 0.0;

  constexpr auto kRouting = static_cast<std::size_t>(LayerClass::RoutingControl);
  constexpr auto kMac = static_cast<std::size_t>(LayerClass::MacControl);
  constexpr auto kData = static_cast<std::size_t>(LayerClass::Data);
  NodeId id = 0;
  for (const auto& l : ledgers) {
    r.energy.routing_tx += l.tx[kRouting];
    r.energy.routing_rx += l.rx[kRouting];
    r.energy.mac_tx += l.tx[kMac];
    r.energy.mac_rx += l.rx[kMac];
    r.energy.data_tx += l.tx[kData];
    r.energy.data_rx += l.rx[kData];
    r.energy.idle += l.idle;
    r.energy.sleep += l.sleep;
    r.energy.transition += l.transition;
    NodeReport n;
    n.id = id++;
    n.initial = l.initial;
    n.residual = l.residual;
    n.consumed = l.consumed();
    n.ledger_imbalance = std::abs((l.initial - l.residual) - l.consumed());
    n.alive = l.alive;
    r.nodes.push_back(n);
  }
  return r;
}

nlohmann::json config_json(const ScenarioConfig& c) {
  using nlohmann::json;
  const auto m = c.effective_mobility();
  json j;
  j["protocol"] = routing::to_string(c.protocol);
  j["nodes"] = c.node_count;
  j["duration_s"] = c.duration;
  j["seed"] = c.seed;
  j["speed_mps"] = c.speed ? json(*c.speed) : json(nullptr);
  j["mobility"] = {
      {"model", to_string(m.model)},
      {"area_m", {m.area.width, m.area.height}},
      {"mean_speed_mps", m.mean_speed},
      {"speed_min_mps", m.speed_min ? json(*m.speed_min) : json(nullptr)},
      {"speed_max_mps", m.speed_max ? json(*m.speed_max) : json(nullptr)},
      {"pause_time_s", m.pause_time},
      {"group_count", m.group_count},
      {"deviation_radius_m", m.deviation_radius},
      {"grid", {m.grid_rows, m.grid_cols}},
      {"speed_change_prob", m.speed_change_prob},
      {"speed_std_dev_mps", m.manhattan_std_dev()},
      {"turns", {{"straight", m.turns.straight}, {"left", m.turns.left}, {"right", m.turns.right}}},
      {"static_positions", c.static_positions.size()},
  };
  j["traffic"] = {
      {"kind", to_string(c.traffic.kind)},
      {"packet_size_bits", c.traffic.packet_size_bits},
      {"send_rate_pps", c.traffic.send_rate},
      {"on_mean_s", c.traffic.on_mean},
      {"off_mean_s", c.traffic.off_mean},
      {"pareto_shape", c.traffic.pareto_shape},
      {"flows", c.flows.empty() ? c.flow_count : c.flows.size()},
      {"flow_start_window_s", {c.flow_start_min, c.flow_start_max}},
      {"flow_stop_margin_s", c.flow_stop_margin},
  };
  j["energy"] = {
      {"initial_j", c.energy.initial_energy},     {"idle_w", c.energy.idle_power},
      {"rx_w", c.energy.rx_power},                {"tx_w", c.energy.tx_power},
      {"transition_w", c.energy.transition_power}, {"sleep_w", c.energy.sleep_power},
      {"transition_time_s", c.energy.transition_time}, {"bit_rate_bps", c.energy.bit_rate},
  };
  const double rts = c.mac.rts_threshold_bits;
  j["channel"] = {{"bit_rate_bps", c.channel.bit_rate},
                  {"tx_range_m", c.channel.tx_range},
                  {"cs_range_m", c.channel.cs_range}};
  j["mac"] = {
      {"slot_s", c.mac.slot},
      {"difs_s", c.mac.difs},
      {"sifs_s", c.mac.sifs},
      {"cw_slots", c.mac.cw_slots},
      {"retry_limit", c.mac.retry_limit},
      {"rts_threshold_bits", std::isfinite(rts) ? json(rts) : json("inf")},
      {"queue_limit", c.mac.queue_limit},
      {"rts_bits", c.mac.rts_bits},
      {"cts_bits", c.mac.cts_bits},
      {"ack_bits", c.mac.ack_bits},
      {"data_header_bits", c.mac.data_header_bits},
  };
  const auto& s = c.routing.sizes;
  j["routing"] = {
      {"active_route_lifetime_s", c.routing.active_route_lifetime},
      {"rreq_retries", c.routing.rreq_retries},
      {"rreq_interval_s", c.routing.rreq_interval},
      {"pending_limit", c.routing.pending_limit},
      {"dsdv_period_s", c.routing.dsdv_period},
      {"dsdv_trigger_interval_s", c.routing.dsdv_trigger_interval},
      {"dsdv_startup_jitter_s", c.routing.dsdv_startup_jitter},
      {"dsdv_neighbor_timeout_s", c.routing.dsdv_neighbor_timeout},
      {"dsr_cache_limit", c.routing.dsr_cache_limit},
      {"broadcast_jitter_s", c.broadcast_jitter},
      {"sizes_bytes",
       {{"aodv_rreq", s.aodv_rreq},
        {"aodv_rrep", s.aodv_rrep},
        {"aodv_rerr", {s.aodv_rerr_base, s.aodv_rerr_per_dest}},
        {"dsr_request_reply", {s.dsr_base, s.dsr_per_node}},
        {"dsr_error", s.dsr_error},
        {"dsr_data_header", {s.dsr_data_base, s.dsr_data_per_node}},
        {"dsdv_update", {s.dsdv_base, s.dsdv_per_entry}}}},
  };
  return j;
}

nlohmann::json decisions_json() {
  return {
      {"packet_size", "512 bytes (4096 bits) per data packet"},
      {"traffic_rate", "4 packets/s while a source is ON"},
      {"on_off_start", "ON/OFF sources start ON; the 1/rate emission grid restarts at each ON period"},
      {"on_period_emissions", "an ON period of length L carries max(1, round(L * rate)) emissions"},
      {"flows", "random distinct source-destination pairs from the flow sub-stream, resampled per seed"},
      {"sweep_speed", "RWP and RPGM move at exactly the sweep speed; Manhattan uses it as the mean speed"},
      {"manhattan_speed", "minimum 0.5 * mean, standard deviation 0.2 * mean unless configured"},
      {"pause_time", "0 s unless configured"},
      {"energy_equation", "E = power * size_bits / bit_rate per frame"},
      {"rx_exposure", "every decodable in-range frame is charged as Rx, collided frames included"},
      {"idle", "idle power accrues between frames only; the radio never sleeps"},
      {"node_death", "a depleted node leaves the channel immediately"},
      {"mac", "fixed CW 32 slots, slot 20 us, DIFS 50 us, SIFS 10 us, retry limit 4, RTS/CTS for all unicast"},
      {"propagation", "unit disk, carrier-sense range equals transmission range, no capture"},
      {"aodv", "no expanding ring search, no hello messages, link breaks from MAC failures"},
      {"dsr", "on-path caching only, no promiscuous overhearing, no packet salvaging"},
      {"dsdv", "no settling-time damping; triggered updates carry changed entries only"},
      {"broadcast_jitter", "broadcasts wait U[0, 10 ms) before reaching the MAC"},
      {"seeds", "cells use seeds base, base+1, ...; named sub-streams per concern"},
  };
}

namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json report_json(const MetricsReport& r) {
  using nlohmann::json;
  json j;
  j["config"] = config_json(r.config);
  j["decisions"] = decisions_json();
  j["energy_j"] = {
      {"routing_tx", r.energy.routing_tx}, {"routing_rx", r.energy.routing_rx}, {"mac_tx", r.energy.mac_tx},
      {"mac_rx", r.energy.mac_rx},         {"data_tx", r.energy.data_tx},       {"data_rx", r.energy.data_rx},
      {"idle", r.energy.idle},             {"sleep", r.energy.sleep},           {"transition", r.energy.transition},
  };
  j["sent"] = r.sent;
  j["delivered"] = r.delivered;
  j["pdf"] = opt(r.pdf);
  j["avg_delay_s"] = opt(r.avg_delay);
  j["throughput_bps"] = r.throughput;
  json nodes = json::array();
  for (const auto& n : r.nodes)
    nodes.push_back({{"id", n.id},
                     {"residual_j", n.residual},
                     {"consumed_j", n.consumed},
                     {"ledger_imbalance_j", n.ledger_imbalance},
                     {"coverage_error_s", n.coverage_error},
                     {"alive", n.alive}});
  j["nodes"] = std::move(nodes);
  const auto& m = r.diagnostics.mac;
  const auto& rt = r.diagnostics.routing;
  json sent = json::object();
  json recv = json::object();
  for (std::size_t k = 1; k < rt.control_sent.size(); ++k) {
    const auto name = std::string(to_string(static_cast<PacketKind>(k)));
    sent[name] = rt.control_sent[k];
    recv[name] = rt.control_received[k];
  }
  j["diagnostics"] = {
      {"events", r.diagnostics.events},
      {"transmissions", r.diagnostics.transmissions},
      {"drops", r.diagnostics.drops},
      {"max_ledger_imbalance_j", r.max_ledger_imbalance()},
      {"max_coverage_error_s", r.max_coverage_error()},
      {"mac",
       {{"rts", m.tx_rts},
        {"cts", m.tx_cts},
        {"ack", m.tx_ack},
        {"data_unicast", m.tx_data_unicast},
        {"data_broadcast", m.tx_data_broadcast},
        {"rx_ok", m.rx_ok},
        {"rx_collided", m.rx_collided},
        {"retransmissions", m.retransmissions},
        {"unicast_failures", m.unicast_failures},
        {"queue_drops", m.queue_drops}}},
      {"routing",
       {{"control_sent", sent},
        {"control_received", recv},
        {"data_forwarded", rt.data_forwarded},
        {"buffer_drops", rt.buffer_drops},
        {"no_route_drops", rt.no_route_drops},
        {"discovery_failures", rt.discovery_failures},
        {"ttl_drops", rt.ttl_drops}}},
  };
  return j;
}

}  // namespace manet::harness
