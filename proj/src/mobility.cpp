#include "manet/mobility/mobility.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace manet::mobility {

Vec2 Area::clamp(Vec2 p) const {
  return {std::clamp(p.x, 0.0, width), std::clamp(p.y, 0.0, height)};
}

Vec2 MobilityTrace::position_at(SimTime t) const {
  if (!(t >= 0.0 && t <= duration)) {
    std::ostringstream os;
    os << "position_at: t=" << t << " outside [0, " << duration << "]";
    throw std::out_of_range(os.str());
  }
  if (waypoints.empty()) throw std::logic_error("position_at: empty trace");
  auto upper = std::upper_bound(waypoints.begin(), waypoints.end(), t,
                                [](SimTime v, const Waypoint& w) { return v < w.time; });
  if (upper == waypoints.begin()) return waypoints.front().position;
  const Waypoint& a = *(upper - 1);
  if (upper == waypoints.end() || a.time == t) return a.position;
  const Waypoint& b = *upper;
  const double f = (t - a.time) / (b.time - a.time);
  return a.position + f * (b.position - a.position);
}

Vec2 position_at(const MobilityTrace& trace, SimTime t) { return trace.position_at(t); }

void MobilityConfig::validate() const {
  if (!(area.width > 0.0 && area.height > 0.0)) throw ConfigError("area dimensions must be positive");
  const auto [lo, hi] = speed_range();
  if (!(lo >= 0.0 && lo <= hi)) throw ConfigError("speed range must satisfy 0 <= speed_min <= speed_max");
  if (!(mean_speed >= 0.0)) throw ConfigError("mean speed must be non-negative");
  if (!(pause_time >= 0.0)) throw ConfigError("pause time must be non-negative");
  if (model == Model::ReferencePointGroup) {
    if (group_count == 0) throw ConfigError("RPGM group count must be positive");
    if (!(deviation_radius >= 0.0)) throw ConfigError("RPGM deviation radius must be non-negative");
  }
  if (model == Model::ManhattanGrid) {
    if (grid_rows < 1 || grid_cols < 1) throw ConfigError("Manhattan grid needs at least one row and column");
    if (!(speed_change_prob >= 0.0 && speed_change_prob <= 1.0))
      throw ConfigError("speed change probability must lie in [0, 1]");
    if (!(manhattan_std_dev() >= 0.0)) throw ConfigError("speed standard deviation must be non-negative");
    if (turns.straight < 0 || turns.left < 0 || turns.right < 0 ||
        std::abs(turns.straight + turns.left + turns.right - 1.0) > 1e-9)
      throw ConfigError("turn probabilities must be non-negative and sum to 1");
  }
}

std::pair<double, double> MobilityConfig::speed_range() const {
  const double lo = speed_min.value_or(std::max(0.1, mean_speed / 2.0));
  const double hi = speed_max.value_or(1.5 * mean_speed);
  return {lo, hi};
}

namespace {

Vec2 uniform_point(const Area& area, sim::RandomStream& rng) {
  const double x = rng.uniform(0.0, area.width);
  const double y = rng.uniform(0.0, area.height);
  return {x, y};
}

MobilityTrace random_waypoint_node(NodeId id, const MobilityConfig& config, SimTime duration,
                                   sim::RandomStream& rng) {
  MobilityTrace trace{id, duration, {}};
  Vec2 pos = uniform_point(config.area, rng);
  trace.waypoints.push_back({0.0, pos, 0.0});
  const auto [lo, hi] = config.speed_range();
  if (duration <= 0.0 || hi <= 0.0) return trace;

  SimTime t = 0.0;
  while (t < duration) {
    Vec2 dest = uniform_point(config.area, rng);
    while (dest == pos) dest = uniform_point(config.area, rng);
    const double speed = rng.uniform(lo, hi);
    if (speed <= 0.0) {
      trace.waypoints.push_back({duration, pos, 0.0});
      break;
    }
    const double leg = distance(pos, dest) / speed;
    trace.waypoints.back().speed_to_next = speed;
    if (t + leg >= duration) {
      const double f = (duration - t) / leg;
      trace.waypoints.push_back({duration, pos + f * (dest - pos), 0.0});
      break;
    }
    t += leg;
    pos = dest;
    trace.waypoints.push_back({t, pos, 0.0});
    if (config.pause_time > 0.0) {
      if (t + config.pause_time >= duration) {
        trace.waypoints.push_back({duration, pos, 0.0});
        break;
      }
      t += config.pause_time;
      trace.waypoints.push_back({t, pos, 0.0});
    }
  }
  return trace;
}

void recompute_speeds(MobilityTrace& trace) {
  auto& w = trace.waypoints;
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    w[i].speed_to_next = distance(w[i].position, w[i + 1].position) / (w[i + 1].time - w[i].time);
  if (!w.empty()) w.back().speed_to_next = 0.0;
}

}  // namespace

std::vector<MobilityTrace> generate_rwp(const MobilityConfig& config, std::size_t node_count,
                                        SimTime duration, sim::RandomStream& rng) {
  config.validate();
  std::vector<MobilityTrace> traces;
  traces.reserve(node_count);
  for (std::size_t i = 0; i < node_count; ++i)
    traces.push_back(random_waypoint_node(static_cast<NodeId>(i), config, duration, rng));
  return traces;
}

GroupTraces generate_rpgm(const MobilityConfig& config, std::size_t node_count, SimTime duration,
                          sim::RandomStream& rng) {
  config.validate();
  if (config.group_count > node_count)
    throw ConfigError("RPGM group count exceeds node count");

  GroupTraces out;
  for (std::size_t g = 0; g < config.group_count; ++g)
    out.centers.push_back(random_waypoint_node(static_cast<NodeId>(g), config, duration, rng));

  const std::size_t per_group = node_count / config.group_count;
  const double radius = config.deviation_radius;
  for (std::size_t i = 0; i < node_count; ++i) {
    const std::size_t g = std::min(i / per_group, config.group_count - 1);
    out.group_of.push_back(g);
    const MobilityTrace& center = out.centers[g];
    MobilityTrace member{static_cast<NodeId>(i), duration, {}};
    member.waypoints.reserve(center.waypoints.size());
    // One reference offset per center leg, uniform in the deviation disk.
    for (const Waypoint& cw : center.waypoints) {
      Vec2 offset{};
      if (radius > 0.0) {
        const double r = radius * std::sqrt(rng.uniform());
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        offset = {r * std::cos(theta), r * std::sin(theta)};
      }
      member.waypoints.push_back({cw.time, config.area.clamp(cw.position + offset), 0.0});
    }
    if (radius == 0.0)
      member.waypoints = center.waypoints;
    else
      recompute_speeds(member);
    out.nodes.push_back(std::move(member));
  }
  return out;
}

bool StreetGrid::on_street(Vec2 p, double tol) const {
  const double bw = area.width / static_cast<double>(cols);
  const double bh = area.height / static_cast<double>(rows);
  const double cx = std::round(p.x / bw) * bw;
  const double cy = std::round(p.y / bh) * bh;
  return std::abs(p.x - cx) <= tol || std::abs(p.y - cy) <= tol;
}

namespace {

// Headings in counter-clockwise order, so left = +1 and right = +3 (mod 4).
constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDy[4] = {0, 1, 0, -1};

struct GridWalker {
  const StreetGrid& grid;
  long col;
  long row;

  bool legal(int heading) const {
    const long c = col + kDx[heading];
    const long r = row + kDy[heading];
    return c >= 0 && r >= 0 && c <= static_cast<long>(grid.cols) && r <= static_cast<long>(grid.rows);
  }
};

// Renormalizes the straight/left/right weights over legal moves; a U-turn
// is taken only when nothing else is legal.
int choose_heading(const GridWalker& w, int heading, const TurnProbabilities& p,
                   sim::RandomStream& rng) {
  const int options[3] = {heading, (heading + 1) % 4, (heading + 3) % 4};
  const double weights[3] = {p.straight, p.left, p.right};
  double total = 0.0;
  for (int i = 0; i < 3; ++i)
    if (w.legal(options[i])) total += weights[i];
  if (total <= 0.0) {
    for (int i = 0; i < 3; ++i)
      if (w.legal(options[i])) return options[i];
    return (heading + 2) % 4;
  }
  double u = rng.uniform() * total;
  int last_legal = heading;
  for (int i = 0; i < 3; ++i) {
    if (!w.legal(options[i])) continue;
    last_legal = options[i];
    if (u < weights[i]) return options[i];
    u -= weights[i];
  }
  return last_legal;
}

MobilityTrace manhattan_node(NodeId id, const MobilityConfig& config, const StreetGrid& grid,
                             SimTime duration, sim::RandomStream& rng) {
  const double bw = grid.area.width / static_cast<double>(grid.cols);
  const double bh = grid.area.height / static_cast<double>(grid.rows);
  const double mean = config.mean_speed;
  const double min_speed = std::max(config.manhattan_min_speed(), 1e-3);
  const double sigma = config.manhattan_std_dev();
  auto draw_speed = [&] { return std::max(min_speed, rng.normal(mean, sigma)); };

  // Start uniformly on the street network.
  const double horizontal_len = static_cast<double>(grid.rows + 1) * grid.area.width;
  const double vertical_len = static_cast<double>(grid.cols + 1) * grid.area.height;
  Vec2 pos;
  GridWalker walker{grid, 0, 0};
  int heading;
  if (rng.uniform() * (horizontal_len + vertical_len) < horizontal_len) {
    walker.row = static_cast<long>(rng.below(grid.rows + 1));
    const double x = rng.uniform(0.0, grid.area.width);
    pos = {x, grid.y_of(static_cast<std::size_t>(walker.row))};
    heading = rng.uniform() < 0.5 ? 0 : 2;
    const long seg = std::min(static_cast<long>(x / bw), static_cast<long>(grid.cols) - 1);
    walker.col = heading == 0 ? seg + 1 : seg;
  } else {
    walker.col = static_cast<long>(rng.below(grid.cols + 1));
    const double y = rng.uniform(0.0, grid.area.height);
    pos = {grid.x_of(static_cast<std::size_t>(walker.col)), y};
    heading = rng.uniform() < 0.5 ? 1 : 3;
    const long seg = std::min(static_cast<long>(y / bh), static_cast<long>(grid.rows) - 1);
    walker.row = heading == 1 ? seg + 1 : seg;
  }

  MobilityTrace trace{id, duration, {}};
  trace.waypoints.push_back({0.0, pos, 0.0});
  if (duration <= 0.0 || mean <= 0.0) return trace;

  double speed = draw_speed();
  SimTime t = 0.0;
  while (true) {
    const Vec2 target{grid.x_of(static_cast<std::size_t>(walker.col)),
                      grid.y_of(static_cast<std::size_t>(walker.row))};
    const double d = distance(pos, target);
    if (d > 0.0) {
      trace.waypoints.back().speed_to_next = speed;
      const double leg = d / speed;
      if (t + leg >= duration) {
        const double f = (duration - t) / leg;
        trace.waypoints.push_back({duration, pos + f * (target - pos), 0.0});
        break;
      }
      t += leg;
      pos = target;
      trace.waypoints.push_back({t, pos, 0.0});
    }
    heading = choose_heading(walker, heading, config.turns, rng);
    if (rng.uniform() < config.speed_change_prob) speed = draw_speed();
    walker.col += kDx[heading];
    walker.row += kDy[heading];
  }
  return trace;
}

}  // namespace

std::vector<MobilityTrace> generate_manhattan(const MobilityConfig& config, std::size_t node_count,
                                              SimTime duration, sim::RandomStream& rng) {
  config.validate();
  const StreetGrid grid{config.area, config.grid_rows, config.grid_cols};
  std::vector<MobilityTrace> traces;
  traces.reserve(node_count);
  for (std::size_t i = 0; i < node_count; ++i)
    traces.push_back(manhattan_node(static_cast<NodeId>(i), config, grid, duration, rng));
  return traces;
}

std::vector<MobilityTrace> generate(const MobilityConfig& config, std::size_t node_count,
                                    SimTime duration, sim::RandomStream& rng) {
  switch (config.model) {
    case Model::RandomWaypoint:
      return generate_rwp(config, node_count, duration, rng);
    case Model::ReferencePointGroup:
      return generate_rpgm(config, node_count, duration, rng).nodes;
    case Model::ManhattanGrid:
      return generate_manhattan(config, node_count, duration, rng);
  }
  throw ConfigError("unknown mobility model");
}

// --- trace file ---------------------------------------------------------

TraceParseError::TraceParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

void validate_trace(const MobilityTrace& trace) {
  if (trace.waypoints.empty()) throw std::invalid_argument("trace has no waypoints");
  if (trace.waypoints.front().time != 0.0)
    throw std::invalid_argument("trace of node " + std::to_string(trace.node) + " does not start at t=0");
  for (std::size_t i = 1; i < trace.waypoints.size(); ++i)
    if (!(trace.waypoints[i].time > trace.waypoints[i - 1].time))
      throw std::invalid_argument("waypoint times of node " + std::to_string(trace.node) +
                                  " are not strictly increasing");
}

void export_trace(std::ostream& out, const std::vector<MobilityTrace>& traces, SimTime duration) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "#manet-trace v1 nodes=%zu duration=%.17g\n", traces.size(), duration);
  out << buf;
  std::vector<const MobilityTrace*> ordered;
  for (const auto& t : traces) ordered.push_back(&t);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const MobilityTrace* a, const MobilityTrace* b) { return a->node < b->node; });
  for (const MobilityTrace* t : ordered) {
    for (const Waypoint& w : t->waypoints) {
      std::snprintf(buf, sizeof buf, "%u %.17g %.17g %.17g\n", t->node, w.time, w.position.x,
                    w.position.y);
      out << buf;
    }
  }
}

std::vector<MobilityTrace> parse_trace(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw TraceParseError(1, "missing header");
  ++lineno;
  std::size_t nodes = 0;
  double duration = 0.0;
  {
    char magic[32] = {0};
    char version[8] = {0};
    if (std::sscanf(line.c_str(), "%31s %7s nodes=%zu duration=%lf", magic, version, &nodes, &duration) != 4 ||
        std::string(magic) != "#manet-trace" || std::string(version) != "v1")
      throw TraceParseError(lineno, "malformed header");
    if (!(duration >= 0.0)) throw TraceParseError(lineno, "negative duration");
  }

  std::vector<MobilityTrace> traces;
  traces.reserve(nodes);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    long long id = -1;
    double t, x, y;
    std::string extra;
    if (!(fields >> id >> t >> x >> y) || (fields >> extra))
      throw TraceParseError(lineno, "expected '<node_id> <time_s> <x_m> <y_m>'");
    if (id < 0 || static_cast<std::size_t>(id) >= nodes)
      throw TraceParseError(lineno, "node id out of range");
    const auto node = static_cast<NodeId>(id);
    if (traces.empty() || traces.back().node != node) {
      if (!traces.empty() && node < traces.back().node)
        throw TraceParseError(lineno, "node blocks not in ascending order");
      if (node != traces.size()) throw TraceParseError(lineno, "missing or repeated node block");
      if (t != 0.0) throw TraceParseError(lineno, "first waypoint of a node must be at t=0");
      traces.push_back(MobilityTrace{node, duration, {}});
    } else if (!(t > traces.back().waypoints.back().time)) {
      throw TraceParseError(lineno, "waypoint times not strictly increasing");
    }
    if (t > duration) throw TraceParseError(lineno, "waypoint beyond trace duration");
    traces.back().waypoints.push_back({t, {x, y}, 0.0});
  }
  if (traces.size() != nodes) throw TraceParseError(lineno, "fewer node blocks than header declares");
  for (auto& t : traces) recompute_speeds(t);
  return traces;
}

}  // namespace manet::mobility
