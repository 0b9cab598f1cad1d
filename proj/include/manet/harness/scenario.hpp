#pragma once

#include <iosfwd>
#include <memory>
#include <unordered_map>
#include <vector>

#include "manet/energy/energy.hpp"
#include "manet/harness/config.hpp"
#include "manet/harness/metrics.hpp"
#include "manet/mac/mac.hpp"
#include "manet/mobility/mobility.hpp"
#include "manet/routing/routing.hpp"
#include "manet/sim/engine.hpp"

namespace manet::harness {

class Scenario;

/// One network node: radio, MAC and routing agent.
class Node final : public routing::RoutingContext {
 public:
  Node(Scenario& scenario, NodeId id);

  NodeId self() const override { return id_; }
  SimTime now() const override;
  void broadcast(Packet packet) override;
  void unicast(Packet packet, NodeId next_hop) override;
  void deliver(const Packet& packet) override;
  void drop(const Packet& packet, std::string_view reason) override;
  sim::EventHandle set_timer(SimTime delay, std::string_view kind, std::function<void()> fn) override;
  void cancel_timer(sim::EventHandle handle) override;
  sim::RandomStream& rng() override { return routing_rng_; }
  std::uint64_t next_uid() override;

  /// Application entry point at the flow source.
  void originate(Packet packet);
  void die();

  bool alive() const { return alive_; }
  routing::RoutingAgent& agent() { return *agent_; }
  const routing::RoutingAgent& agent() const { return *agent_; }
  mac::Mac& mac() { return *mac_; }
  const mac::Mac& mac() const { return *mac_; }
  energy::Radio& radio() { return *radio_; }
  const energy::EnergyLedger& ledger() const { return ledger_; }
  std::uint64_t drops() const { return drops_; }

 private:
  void log_packet(const Packet& packet, std::string_view action);
  void on_mac_receive(const std::shared_ptr<const Packet>& packet, NodeId from);
  void on_mac_failure(const std::shared_ptr<const Packet>& packet, NodeId next_hop);

  Scenario& scenario_;
  NodeId id_;
  bool alive_ = true;
  energy::EnergyLedger ledger_;
  std::unique_ptr<energy::Radio> radio_;
  std::unique_ptr<mac::Mac> mac_;
  std::unique_ptr<routing::RoutingAgent> agent_;
  sim::RandomStream routing_rng_;
  sim::RandomStream jitter_rng_;
  std::uint64_t drops_ = 0;
};

struct RunOptions {
  /// Records and writes every delivered event.
  std::ostream* event_log = nullptr;
  /// One line per control packet sent, received or dropped.
  std::ostream* protocol_log = nullptr;
};

class Scenario {
 public:
  explicit Scenario(const ScenarioConfig& config, RunOptions options = {});
  ~Scenario();

  Scenario(const Scenario&) = delete;
  Scenario& operator=(const Scenario&) = delete;

  /// Runs to the configured duration. Call once.
  MetricsReport run();

  /// Runs up to `until` without finishing; for tests that inspect state.
  void advance(SimTime until);

  const ScenarioConfig& config() const { return config_; }
  sim::Engine& engine() { return engine_; }
  mac::Channel& channel() { return *channel_; }
  std::size_t size() const { return nodes_.size(); }
  Node& node(NodeId id) { return *nodes_.at(id); }
  const std::vector<mobility::MobilityTrace>& traces() const { return traces_; }
  const std::vector<traffic::FlowSpec>& flows() const { return flows_; }
  const std::vector<DataRecord>& records() const { return records_; }
  mobility::Vec2 position(NodeId id, SimTime t) const;

 private:
  friend class Node;

  void build_traces();
  void build_flows();
  void schedule_traffic();
  void record_delivery(const Packet& packet);
  MetricsReport finish();

  ScenarioConfig config_;
  RunOptions options_;
  sim::Engine engine_;
  std::vector<mobility::MobilityTrace> traces_;
  std::vector<traffic::FlowSpec> flows_;
  std::unique_ptr<mac::Channel> channel_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::vector<DataRecord> records_;
  std::unordered_map<std::uint64_t, std::size_t> record_index_;
  std::uint64_t next_uid_ = 1;
  bool ran_ = false;
};

/// Builds and runs one scenario.
MetricsReport run_scenario(const ScenarioConfig& config, RunOptions options = {});

}  // namespace manet::harness
