#include "manet/harness/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>

namespace manet::harness {

namespace {

std::string stream_name(std::string_view base, NodeId id) { return std::string(base) + "/" + std::to_string(id); }

const ScenarioConfig& validated(const ScenarioConfig& c) {
  c.validate();
  return c;
}

void add(mac::MacStats& a, const mac::MacStats& b) {
  a.tx_rts += b.tx_rts;
  a.tx_cts += b.tx_cts;
  a.tx_ack += b.tx_ack;
  a.tx_data_unicast += b.tx_data_unicast;
  a.tx_data_broadcast += b.tx_data_broadcast;
  a.rx_ok += b.rx_ok;
  a.rx_collided += b.rx_collided;
  a.delivered_unicast += b.delivered_unicast;
  a.delivered_broadcast += b.delivered_broadcast;
  a.duplicates += b.duplicates;
  a.acks_received += b.acks_received;
  a.retransmissions += b.retransmissions;
  a.unicast_failures += b.unicast_failures;
  a.queue_drops += b.queue_drops;
  a.overlap_violations += b.overlap_violations;
  a.tx_reports += b.tx_reports;
  a.rx_reports += b.rx_reports;
}

void add(routing::RoutingStats& a, const routing::RoutingStats& b) {
  for (std::size_t i = 0; i < a.control_sent.size(); ++i) {
    a.control_sent[i] += b.control_sent[i];
    a.control_received[i] += b.control_received[i];
  }
  a.data_originated += b.data_originated;
  a.data_delivered += b.data_delivered;
  a.data_forwarded += b.data_forwarded;
  a.buffer_drops += b.buffer_drops;
  a.no_route_drops += b.no_route_drops;
  a.discovery_failures += b.discovery_failures;
  a.duplicates += b.duplicates;
  a.stale_replies += b.stale_replies;
  a.ttl_drops += b.ttl_drops;
  a.malformed += b.malformed;
}

}  // namespace

// --- Node --------------------------------------------------------------------

Node::Node(Scenario& scenario, NodeId id)
    : scenario_(scenario),
      id_(id),
      ledger_(energy::EnergyLedger::with_initial(scenario.config_.energy.initial_energy)),
      routing_rng_(sim::derive_stream(scenario.config_.seed, stream_name("routing", id))),
      jitter_rng_(sim::derive_stream(scenario.config_.seed, stream_name("jitter", id))) {
  const ScenarioConfig& cfg = scenario.config_;
  radio_ = std::make_unique<energy::Radio>(ledger_, cfg.energy, 0.0);
  mac_ = std::make_unique<mac::Mac>(id, scenario.engine_, *scenario.channel_, cfg.mac,
                                    sim::derive_stream(cfg.seed, stream_name("mac", id)), radio_.get());
  agent_ = routing::make_agent(cfg.protocol, *this, cfg.routing);
  mac_->set_callbacks({
      [this](const std::shared_ptr<const Packet>& p, NodeId from) { on_mac_receive(p, from); },
      [this](const std::shared_ptr<const Packet>& p, NodeId hop) { on_mac_failure(p, hop); },
      nullptr,
  });
  radio_->on_depleted([this] {
    scenario_.engine_.schedule_in(0.0, sim::EventTag{"node-death", id_, 0}, [this] { die(); });
  });
  scenario.channel_->attach(id, *mac_);
}

SimTime Node::now() const { return scenario_.engine_.now(); }

std::uint64_t Node::next_uid() { return scenario_.next_uid_++; }

void Node::log_packet(const Packet& packet, std::string_view action) {
  std::ostream* out = scenario_.options_.protocol_log;
  if (out == nullptr || packet.layer != LayerClass::RoutingControl) return;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", now());
  *out << buf << ' ' << id_ << ' ' << to_string(packet.kind) << ' ' << packet.size_bits << ' ' << action << '\n';
}

void Node::broadcast(Packet packet) {
  if (!alive_) return;
  log_packet(packet, "send");
  const double jitter = scenario_.config_.broadcast_jitter;
  const double delay = jitter > 0.0 ? jitter_rng_.uniform(0.0, jitter) : 0.0;
  auto p = std::make_shared<const Packet>(std::move(packet));
  scenario_.engine_.schedule_in(delay, sim::EventTag{"bcast", id_, p->uid}, [this, p] {
    if (!alive_) return;
    if (!mac_->send(p, kBroadcast)) drop(*p, "queue-full");
  });
}

void Node::unicast(Packet packet, NodeId next_hop) {
  if (!alive_) return;
  log_packet(packet, "send");
  auto p = std::make_shared<const Packet>(std::move(packet));
  if (!mac_->send(p, next_hop)) drop(*p, "queue-full");
}

void Node::deliver(const Packet& packet) { scenario_.record_delivery(packet); }

void Node::drop(const Packet& packet, std::string_view reason) {
  (void)reason;
  ++drops_;
  log_packet(packet, "drop");
}

sim::EventHandle Node::set_timer(SimTime delay, std::string_view kind, std::function<void()> fn) {
  return scenario_.engine_.schedule_in(delay, sim::EventTag{kind, id_, 0}, [this, fn = std::move(fn)] {
    if (alive_) fn();
  });
}

void Node::cancel_timer(sim::EventHandle handle) { scenario_.engine_.cancel(handle); }

void Node::originate(Packet packet) {
  if (alive_) agent_->send_data(std::move(packet));
}

void Node::die() {
  if (!alive_) return;
  alive_ = false;
  mac_->shutdown();
  scenario_.channel_->detach(id_);
}

void Node::on_mac_receive(const std::shared_ptr<const Packet>& packet, NodeId from) {
  if (!alive_) return;
  log_packet(*packet, "recv");
  agent_->on_receive(*packet, from);
}

void Node::on_mac_failure(const std::shared_ptr<const Packet>& packet, NodeId next_hop) {
  if (!alive_) return;
  agent_->on_tx_failure(*packet, next_hop);
  for (const auto& p : mac_->purge(next_hop)) agent_->on_tx_failure(*p, next_hop);
}

// --- Scenario ----------------------------------------------------------------

Scenario::Scenario(const ScenarioConfig& config, RunOptions options)
    : config_(validated(config)), options_(options), engine_(config.duration, options.event_log != nullptr) {
  build_traces();
  build_flows();
  channel_ = std::make_unique<mac::Channel>(engine_, config_.channel, config_.node_count,
                                            [this](NodeId id, SimTime t) { return position(id, t); });
  nodes_.reserve(config_.node_count);
  for (NodeId i = 0; i < config_.node_count; ++i) nodes_.push_back(std::make_unique<Node>(*this, i));
  for (auto& n : nodes_) n->agent().start();
  schedule_traffic();
}

Scenario::~Scenario() = default;

mobility::Vec2 Scenario::position(NodeId id, SimTime t) const { return traces_[id].position_at(t); }

void Scenario::build_traces() {
  const auto n = config_.node_count;
  if (!config_.static_positions.empty()) {
    for (NodeId i = 0; i < n; ++i) {
      mobility::MobilityTrace t;
      t.node = i;
      t.duration = config_.duration;
      t.waypoints.push_back({0.0, config_.static_positions[i], 0.0});
      traces_.push_back(std::move(t));
    }
    return;
  }
  auto rng = sim::derive_stream(config_.seed, "mobility");
  traces_ = mobility::generate(config_.effective_mobility(), n, config_.duration, rng);
}

void Scenario::build_flows() {
  if (!config_.flows.empty()) {
    flows_ = config_.flows;
    return;
  }
  auto rng = sim::derive_stream(config_.seed, "flows");
  const auto n = config_.node_count;
  std::set<std::pair<NodeId, NodeId>> used;
  while (flows_.size() < config_.flow_count) {
    const auto src = static_cast<NodeId>(rng.below(n));
    auto dst = static_cast<NodeId>(rng.below(n - 1));
    if (dst >= src) ++dst;
    if (!used.insert({src, dst}).second) continue;
    const double start = rng.uniform(config_.flow_start_min, config_.flow_start_max);
    flows_.push_back({src, dst, start, config_.duration - config_.flow_stop_margin});
  }
}

void Scenario::schedule_traffic() {
  auto rng = sim::derive_stream(config_.seed, "traffic");
  for (std::size_t k = 0; k < flows_.size(); ++k) {
    const auto flow = flows_[k];
    for (SimTime t : traffic::make_schedule(flow, config_.traffic, rng)) {
      engine_.schedule(t, sim::EventTag{"app-send", flow.source, k}, [this, flow] {
        Node& src = *nodes_[flow.source];
        if (!src.alive()) return;
        Packet p;
        p.uid = next_uid_++;
        p.layer = LayerClass::Data;
        p.kind = PacketKind::Data;
        p.size_bits = config_.traffic.packet_size_bits;
        p.payload_bits = config_.traffic.packet_size_bits;
        p.origin = flow.source;
        p.destination = flow.destination;
        p.created = engine_.now();
        record_index_[p.uid] = records_.size();
        records_.push_back({p.uid, p.created, std::nullopt, p.payload_bits});
        src.originate(std::move(p));
      });
    }
  }
}

void Scenario::record_delivery(const Packet& packet) {
  auto it = record_index_.find(packet.uid);
  if (it == record_index_.end()) return;
  DataRecord& r = records_[it->second];
  if (!r.delivered) r.delivered = engine_.now();
}

void Scenario::advance(SimTime until) { engine_.run(until); }

MetricsReport Scenario::run() {
  if (ran_) throw std::logic_error("Scenario::run called twice");
  ran_ = true;
  engine_.run(config_.duration);
  return finish();
}

MetricsReport Scenario::finish() {
  std::vector<energy::EnergyLedger> ledgers;
  ledgers.reserve(nodes_.size());
  for (auto& n : nodes_) {
    n->radio().advance(config_.duration);
    ledgers.push_back(n->ledger());
  }
  MetricsReport report = compute_metrics(records_, ledgers, config_.duration);
  report.config = config_;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    Node& n = *nodes_[i];
    if (n.ledger().alive) report.nodes[i].coverage_error = std::abs(n.radio().times().total() - config_.duration);
    add(report.diagnostics.mac, n.mac().stats());
    add(report.diagnostics.routing, n.agent().stats());
    report.diagnostics.drops += n.drops();
  }
  report.diagnostics.events = engine_.delivered();
  report.diagnostics.transmissions = channel_->transmissions();
  if (options_.event_log != nullptr) sim::write_event_log(*options_.event_log, engine_.log());
  return report;
}

MetricsReport run_scenario(const ScenarioConfig& config, RunOptions options) {
  Scenario s(config, options);
  return s.run();
}

}  // namespace manet::harness
