#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "manet/energy/energy.hpp"
#include "manet/mac/mac.hpp"
#include "manet/mobility/mobility.hpp"
#include "manet/routing/routing.hpp"
#include "manet/traffic/traffic.hpp"

namespace manet::harness {

std::string_view to_string(mobility::Model m);
std::string_view to_string(traffic::Kind k);
/// "rwp", "rpgm", "manhattan".
mobility::Model parse_mobility(std::string_view text);
/// "cbr", "exp", "pareto".
traffic::Kind parse_traffic(std::string_view text);

struct ScenarioConfig {
  routing::Protocol protocol = routing::Protocol::Aodv;
  mobility::MobilityConfig mobility;
  traffic::TrafficConfig traffic;
  std::size_t node_count = 50;
  std::size_t flow_count = 10;
  SimTime duration = 120.0;
  std::uint64_t seed = 1;

  /// Sweep speed axis. When set it overrides the mobility speeds: RWP and
  /// RPGM move at exactly this speed, Manhattan uses it as the mean.
  std::optional<double> speed;

  /// Flow start times are uniform on [flow_start_min, flow_start_max];
  /// flows stop flow_stop_margin before the end.
  double flow_start_min = 1.0;
  double flow_start_max = 5.0;
  double flow_stop_margin = 1.0;
  /// Explicit flows replace the random selection.
  std::vector<traffic::FlowSpec> flows;
  /// Fixed node positions replace the mobility model.
  std::vector<mobility::Vec2> static_positions;

  energy::EnergyParams energy;
  mac::ChannelModel channel;
  mac::MacParams mac;
  routing::RoutingParams routing;
  /// Broadcasts are delayed by U[0, broadcast_jitter) before reaching the MAC.
  double broadcast_jitter = 0.01;

  /// Mobility config after applying `speed`.
  mobility::MobilityConfig effective_mobility() const;

  /// Throws ConfigError.
  void validate() const;
};

/// Parses `key = value` lines. `#` starts a comment. Unknown keys and bad
/// values throw ConfigError naming the line.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::string& path);

/// Every key parse_config accepts, in sorted order.
std::vector<std::string> config_keys();

}  // namespace manet::harness
