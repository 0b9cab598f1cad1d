#include "manet/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

namespace manet::harness {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view v) {
  const std::string s = lower(trim(v));
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) throw ConfigError("expected a number, got '" + s + "'");
  return out;
}

std::uint64_t to_uint(std::string_view v) {
  const std::string_view s = trim(v);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("expected a non-negative integer, got '" + std::string(s) + "'");
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

using Setter = std::function<void(ScenarioConfig&, std::string_view)>;

template <typename T>
Setter number(T ScenarioConfig::*member) {
  return [member](ScenarioConfig& c, std::string_view v) {
    if constexpr (std::is_floating_point_v<T>)
      c.*member = to_double(v);
    else
      c.*member = static_cast<T>(to_uint(v));
  };
}

template <typename Sub, typename T>
Setter nested(Sub ScenarioConfig::*sub, T Sub::*member) {
  return [sub, member](ScenarioConfig& c, std::string_view v) {
    if constexpr (std::is_floating_point_v<T>)
      (c.*sub).*member = to_double(v);
    else
      (c.*sub).*member = static_cast<T>(to_uint(v));
  };
}

Setter size_field(std::uint32_t routing::ControlSizes::*member) {
  return [member](ScenarioConfig& c, std::string_view v) {
    c.routing.sizes.*member = static_cast<std::uint32_t>(to_uint(v));
  };
}

const std::map<std::string, Setter>& setters() {
  using mobility::MobilityConfig;
  static const std::map<std::string, Setter> table = {
      {"protocol", [](ScenarioConfig& c, std::string_view v) { c.protocol = routing::parse_protocol(trim(v)); }},
      {"mobility", [](ScenarioConfig& c, std::string_view v) { c.mobility.model = parse_mobility(trim(v)); }},
      {"traffic", [](ScenarioConfig& c, std::string_view v) { c.traffic.kind = parse_traffic(trim(v)); }},
      {"nodes", number(&ScenarioConfig::node_count)},
      {"flows", number(&ScenarioConfig::flow_count)},
      {"duration", number(&ScenarioConfig::duration)},
      {"seed", number(&ScenarioConfig::seed)},
      {"speed", [](ScenarioConfig& c, std::string_view v) { c.speed = to_double(v); }},
      {"flow_start_min", number(&ScenarioConfig::flow_start_min)},
      {"flow_start_max", number(&ScenarioConfig::flow_start_max)},
      {"flow_stop_margin", number(&ScenarioConfig::flow_stop_margin)},
      {"broadcast_jitter", number(&ScenarioConfig::broadcast_jitter)},
      {"flow",
       [](ScenarioConfig& c, std::string_view v) {
         const auto w = words(v);
         if (w.size() != 4) throw ConfigError("flow expects '<source> <destination> <start> <stop>'");
         c.flows.push_back(traffic::FlowSpec{static_cast<NodeId>(to_uint(w[0])), static_cast<NodeId>(to_uint(w[1])),
                                             to_double(w[2]), to_double(w[3])});
       }},
      {"static_positions",
       [](ScenarioConfig& c, std::string_view v) {
         c.static_positions.clear();
         for (auto item : split(v, ';')) {
           if (item.empty()) continue;
           const auto xy = split(item, ',');
           if (xy.size() != 2) throw ConfigError("static_positions expects 'x,y; x,y; ...'");
           c.static_positions.push_back({to_double(xy[0]), to_double(xy[1])});
         }
       }},
      // mobility
      {"area_width", [](ScenarioConfig& c, std::string_view v) { c.mobility.area.width = to_double(v); }},
      {"area_height", [](ScenarioConfig& c, std::string_view v) { c.mobility.area.height = to_double(v); }},
      {"mean_speed", nested(&ScenarioConfig::mobility, &MobilityConfig::mean_speed)},
      {"speed_min", [](ScenarioConfig& c, std::string_view v) { c.mobility.speed_min = to_double(v); }},
      {"speed_max", [](ScenarioConfig& c, std::string_view v) { c.mobility.speed_max = to_double(v); }},
      {"pause_time", nested(&ScenarioConfig::mobility, &MobilityConfig::pause_time)},
      {"group_count", nested(&ScenarioConfig::mobility, &MobilityConfig::group_count)},
      {"deviation_radius", nested(&ScenarioConfig::mobility, &MobilityConfig::deviation_radius)},
      {"grid_rows", nested(&ScenarioConfig::mobility, &MobilityConfig::grid_rows)},
      {"grid_cols", nested(&ScenarioConfig::mobility, &MobilityConfig::grid_cols)},
      {"speed_change_prob", nested(&ScenarioConfig::mobility, &MobilityConfig::speed_change_prob)},
      {"speed_std_dev", [](ScenarioConfig& c, std::string_view v) { c.mobility.speed_std_dev = to_double(v); }},
      {"turn_straight", [](ScenarioConfig& c, std::string_view v) { c.mobility.turns.straight = to_double(v); }},
      {"turn_left", [](ScenarioConfig& c, std::string_view v) { c.mobility.turns.left = to_double(v); }},
      {"turn_right", [](ScenarioConfig& c, std::string_view v) { c.mobility.turns.right = to_double(v); }},
      // traffic
      {"packet_size_bits", nested(&ScenarioConfig::traffic, &traffic::TrafficConfig::packet_size_bits)},
      {"send_rate", nested(&ScenarioConfig::traffic, &traffic::TrafficConfig::send_rate)},
      {"on_mean", nested(&ScenarioConfig::traffic, &traffic::TrafficConfig::on_mean)},
      {"off_mean", nested(&ScenarioConfig::traffic, &traffic::TrafficConfig::off_mean)},
      {"pareto_shape", nested(&ScenarioConfig::traffic, &traffic::TrafficConfig::pareto_shape)},
      // energy
      {"initial_energy", nested(&ScenarioConfig::energy, &energy::EnergyParams::initial_energy)},
      {"idle_power", nested(&ScenarioConfig::energy, &energy::EnergyParams::idle_power)},
      {"rx_power", nested(&ScenarioConfig::energy, &energy::EnergyParams::rx_power)},
      {"tx_power", nested(&ScenarioConfig::energy, &energy::EnergyParams::tx_power)},
      {"transition_power", nested(&ScenarioConfig::energy, &energy::EnergyParams::transition_power)},
      {"sleep_power", nested(&ScenarioConfig::energy, &energy::EnergyParams::sleep_power)},
      {"transition_time", nested(&ScenarioConfig::energy, &energy::EnergyParams::transition_time)},
      {"bit_rate",
       [](ScenarioConfig& c, std::string_view v) {
         c.energy.bit_rate = to_double(v);
         c.channel.bit_rate = c.energy.bit_rate;
       }},
      // channel and MAC
      {"tx_range", nested(&ScenarioConfig::channel, &mac::ChannelModel::tx_range)},
      {"cs_range", nested(&ScenarioConfig::channel, &mac::ChannelModel::cs_range)},
      {"slot_time", nested(&ScenarioConfig::mac, &mac::MacParams::slot)},
      {"difs", nested(&ScenarioConfig::mac, &mac::MacParams::difs)},
      {"sifs", nested(&ScenarioConfig::mac, &mac::MacParams::sifs)},
      {"cw_slots", nested(&ScenarioConfig::mac, &mac::MacParams::cw_slots)},
      {"retry_limit", nested(&ScenarioConfig::mac, &mac::MacParams::retry_limit)},
      {"rts_threshold_bits", nested(&ScenarioConfig::mac, &mac::MacParams::rts_threshold_bits)},
      {"queue_limit", nested(&ScenarioConfig::mac, &mac::MacParams::queue_limit)},
      {"rts_bits", nested(&ScenarioConfig::mac, &mac::MacParams::rts_bits)},
      {"cts_bits", nested(&ScenarioConfig::mac, &mac::MacParams::cts_bits)},
      {"ack_bits", nested(&ScenarioConfig::mac, &mac::MacParams::ack_bits)},
      {"data_header_bits", nested(&ScenarioConfig::mac, &mac::MacParams::data_header_bits)},
      // routing
      {"active_route_lifetime", [](ScenarioConfig& c, std::string_view v) { c.routing.active_route_lifetime = to_double(v); }},
      {"rreq_retries", [](ScenarioConfig& c, std::string_view v) { c.routing.rreq_retries = static_cast<std::uint32_t>(to_uint(v)); }},
      {"rreq_interval", [](ScenarioConfig& c, std::string_view v) { c.routing.rreq_interval = to_double(v); }},
      {"pending_limit", [](ScenarioConfig& c, std::string_view v) { c.routing.pending_limit = to_uint(v); }},
      {"dsdv_period", [](ScenarioConfig& c, std::string_view v) { c.routing.dsdv_period = to_double(v); }},
      {"dsdv_trigger_interval", [](ScenarioConfig& c, std::string_view v) { c.routing.dsdv_trigger_interval = to_double(v); }},
      {"dsdv_startup_jitter", [](ScenarioConfig& c, std::string_view v) { c.routing.dsdv_startup_jitter = to_double(v); }},
      {"dsdv_neighbor_timeout", [](ScenarioConfig& c, std::string_view v) { c.routing.dsdv_neighbor_timeout = to_double(v); }},
      {"dsr_cache_limit", [](ScenarioConfig& c, std::string_view v) { c.routing.dsr_cache_limit = to_uint(v); }},
      {"aodv_rreq_bytes", size_field(&routing::ControlSizes::aodv_rreq)},
      {"aodv_rrep_bytes", size_field(&routing::ControlSizes::aodv_rrep)},
      {"aodv_rerr_base_bytes", size_field(&routing::ControlSizes::aodv_rerr_base)},
      {"aodv_rerr_per_dest_bytes", size_field(&routing::ControlSizes::aodv_rerr_per_dest)},
      {"dsr_base_bytes", size_field(&routing::ControlSizes::dsr_base)},
      {"dsr_per_node_bytes", size_field(&routing::ControlSizes::dsr_per_node)},
      {"dsr_error_bytes", size_field(&routing::ControlSizes::dsr_error)},
      {"dsr_data_base_bytes", size_field(&routing::ControlSizes::dsr_data_base)},
      {"dsr_data_per_node_bytes", size_field(&routing::ControlSizes::dsr_data_per_node)},
      {"dsdv_base_bytes", size_field(&routing::ControlSizes::dsdv_base)},
      {"dsdv_per_entry_bytes", size_field(&routing::ControlSizes::dsdv_per_entry)},
  };
  return table;
}

}  // namespace

std::string_view to_string(mobility::Model m) {
  switch (m) {
    case mobility::Model::RandomWaypoint: return "rwp";
    case mobility::Model::ReferencePointGroup: return "rpgm";
    case mobility::Model::ManhattanGrid: return "manhattan";
  }
  return "?";
}

std::string_view to_string(traffic::Kind k) {
  switch (k) {
    case traffic::Kind::Cbr: return "cbr";
    case traffic::Kind::Exponential: return "exp";
    case traffic::Kind::Pareto: return "pareto";
  }
  return "?";
}

mobility::Model parse_mobility(std::string_view text) {
  const std::string s = lower(text);
  if (s == "rwp") return mobility::Model::RandomWaypoint;
  if (s == "rpgm") return mobility::Model::ReferencePointGroup;
  if (s == "manhattan") return mobility::Model::ManhattanGrid;
  throw ConfigError("unknown mobility model '" + std::string(text) + "'");
}

traffic::Kind parse_traffic(std::string_view text) {
  const std::string s = lower(text);
  if (s == "cbr") return traffic::Kind::Cbr;
  if (s == "exp" || s == "exponential") return traffic::Kind::Exponential;
  if (s == "pareto") return traffic::Kind::Pareto;
  throw ConfigError("unknown traffic model '" + std::string(text) + "'");
}

mobility::MobilityConfig ScenarioConfig::effective_mobility() const {
  mobility::MobilityConfig m = mobility;
  if (!speed) return m;
  m.mean_speed = *speed;
  if (m.model == mobility::Model::ManhattanGrid) {
    m.speed_min.reset();
    m.speed_max.reset();
  } else {
    m.speed_min = *speed;
    m.speed_max = *speed;
  }
  return m;
}

void ScenarioConfig::validate() const {
  if (node_count < 2) throw ConfigError("node count must be at least 2");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("duration must be positive");
  if (speed && !(*speed > 0.0)) throw ConfigError("speed must be positive");
  if (!(broadcast_jitter >= 0.0)) throw ConfigError("broadcast jitter must be non-negative");
  if (static_positions.empty()) {
    effective_mobility().validate();
  } else {
    if (static_positions.size() != node_count)
      throw ConfigError("static_positions must list exactly one position per node");
    for (const auto& p : static_positions)
      if (!mobility.area.contains(p, 0.0)) throw ConfigError("static position outside the area");
  }
  traffic.validate();
  energy.validate();
  channel.validate();
  mac.validate();
  routing.validate();
  if (energy.bit_rate != channel.bit_rate) throw ConfigError("energy and channel bit rates differ");
  if (flows.empty()) {
    if (flow_count > node_count * (node_count - 1)) throw ConfigError("more flows than source-destination pairs");
    if (!(flow_start_min >= 0.0 && flow_start_min <= flow_start_max))
      throw ConfigError("flow start window must satisfy 0 <= min <= max");
    if (!(flow_stop_margin >= 0.0)) throw ConfigError("flow stop margin must be non-negative");
    if (flow_count > 0 && !(flow_start_max < duration - flow_stop_margin))
      throw ConfigError("flow start window must end before the flows stop");
  } else {
    for (const auto& f : flows) {
      if (f.source >= node_count || f.destination >= node_count) throw ConfigError("flow endpoint out of range");
      f.validate(duration);
    }
  }
}

ScenarioConfig parse_config(std::istream& in) {
  ScenarioConfig config;
  bool explicit_flows = false;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view text = line;
    if (auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    auto fail = [&](const std::string& what) {
      throw ConfigError("config line " + std::to_string(number) + ": " + what);
    };
    if (eq == std::string_view::npos) fail("expected 'key = value'");
    const std::string key = lower(trim(text.substr(0, eq)));
    const std::string_view value = trim(text.substr(eq + 1));
    const auto& table = setters();
    auto it = table.find(key);
    if (it == table.end()) fail("unknown key '" + key + "'");
    if (value.empty()) fail("missing value for '" + key + "'");
    try {
      if (key == "flow" && !explicit_flows) {
        config.flows.clear();
        explicit_flows = true;
      }
      it->second(config, value);
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }
  if (explicit_flows) config.flow_count = config.flows.size();
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, v] : setters()) keys.push_back(k);
  return keys;
}

}  // namespace manet::harness
