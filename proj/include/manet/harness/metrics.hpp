#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "manet/energy/energy.hpp"
#include "manet/harness/config.hpp"

namespace manet::harness {

/// One application data packet: emitted at `sent`, delivered at `delivered`.
struct DataRecord {
  std::uint64_t uid = 0;
  SimTime sent = 0.0;
  std::optional<SimTime> delivered;
  std::uint32_t payload_bits = 0;
};

struct EnergyTotals {
  double routing_tx = 0.0;
  double routing_rx = 0.0;
  double mac_tx = 0.0;
  double mac_rx = 0.0;
  double data_tx = 0.0;
  double data_rx = 0.0;
  double idle = 0.0;
  double sleep = 0.0;
  double transition = 0.0;

  double routing() const { return routing_tx + routing_rx; }
  double mac() const { return mac_tx + mac_rx; }
  double control() const { return routing() + mac(); }
  double data() const { return data_tx + data_rx; }
  double total() const { return control() + data() + idle + sleep + transition; }
};

struct NodeReport {
  NodeId id = 0;
  double initial = 0.0;
  double residual = 0.0;
  double consumed = 0.0;
  /// |initial - residual - sum of categories|.
  double ledger_imbalance = 0.0;
  /// |state time accrued - elapsed|; 0 for dead nodes.
  double coverage_error = 0.0;
  bool alive = true;
};

struct Diagnostics {
  std::uint64_t events = 0;
  std::uint64_t transmissions = 0;
  mac::MacStats mac;
  routing::RoutingStats routing;
  std::uint64_t drops = 0;
};

struct MetricsReport {
  ScenarioConfig config;
  EnergyTotals energy;
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  /// Absent when nothing was sent.
  std::optional<double> pdf;
  /// Absent when nothing was delivered.
  std::optional<double> avg_delay;
  double throughput = 0.0;
  std::vector<NodeReport> nodes;
  Diagnostics diagnostics;

  double max_ledger_imbalance() const;
  double max_coverage_error() const;
};

/// Fills the traffic and energy fields of a report. Time coverage is left
/// to the caller, which owns the radios.
MetricsReport compute_metrics(std::span<const DataRecord> records, std::span<const energy::EnergyLedger> ledgers,
                              SimTime duration);

nlohmann::json config_json(const ScenarioConfig& config);
/// Decisions the simulator makes where the modeled system leaves a choice.
nlohmann::json decisions_json();
nlohmann::json report_json(const MetricsReport& report);

}  // namespace manet::harness
