#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "manet/sim/random.hpp"
#include "manet/types.hpp"

namespace manet::mobility {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

struct Area {
  double width = 500.0;
  double height = 500.0;

  bool contains(Vec2 p, double tol = 1e-9) const {
    return p.x >= -tol && p.y >= -tol && p.x <= width + tol && p.y <= height + tol;
  }
  Vec2 clamp(Vec2 p) const;
};

struct Waypoint {
  SimTime time = 0.0;
  Vec2 position;
  /// Speed of the leg that starts here; 0 for pauses and for the last point.
  double speed_to_next = 0.0;
};

/// Piecewise-linear movement schedule of one node over [0, duration].
struct MobilityTrace {
  NodeId node = 0;
  SimTime duration = 0.0;
  std::vector<Waypoint> waypoints;

  /// Linear interpolation between the bracketing waypoints. Throws
  /// std::out_of_range for t outside [0, duration].
  Vec2 position_at(SimTime t) const;
};

Vec2 position_at(const MobilityTrace& trace, SimTime t);

enum class Model { RandomWaypoint, ReferencePointGroup, ManhattanGrid };

struct TurnProbabilities {
  double straight = 0.5;
  double left = 0.25;
  double right = 0.25;
};

struct MobilityConfig {
  Model model = Model::RandomWaypoint;
  Area area;
  /// Used to derive the speed interval when speed_min/speed_max are unset,
  /// and as the Manhattan mean speed.
  double mean_speed = 10.0;
  std::optional<double> speed_min;
  std::optional<double> speed_max;
  double pause_time = 0.0;

  std::size_t group_count = 5;
  double deviation_radius = 50.0;

  std::size_t grid_rows = 10;
  std::size_t grid_cols = 10;
  double speed_change_prob = 0.2;
  /// Absolute standard deviation (m/s) for Manhattan speed changes; unset
  /// means 0.2 * mean_speed.
  std::optional<double> speed_std_dev;
  TurnProbabilities turns;

  /// Throws ConfigError.
  void validate() const;

  /// [speed_min, speed_max], defaulting to [max(0.1, v/2), 3v/2] for
  /// mean speed v.
  std::pair<double, double> speed_range() const;
  double manhattan_std_dev() const { return speed_std_dev.value_or(0.2 * mean_speed); }
  /// Manhattan minimum speed; defaults to half the mean speed.
  double manhattan_min_speed() const { return speed_min.value_or(0.5 * mean_speed); }
};

std::vector<MobilityTrace> generate_rwp(const MobilityConfig& config, std::size_t node_count,
                                        SimTime duration, sim::RandomStream& rng);

struct GroupTraces {
  std::vector<MobilityTrace> nodes;
  std::vector<MobilityTrace> centers;
  /// Group index of each node.
  std::vector<std::size_t> group_of;
};

/// Groups are filled in node order with node_count / group_count members
/// each; remainder nodes join the last group.
GroupTraces generate_rpgm(const MobilityConfig& config, std::size_t node_count,
                          SimTime duration, sim::RandomStream& rng);

/// Street network of a Manhattan grid: (grid_rows + 1) horizontal and
/// (grid_cols + 1) vertical streets spanning the area, borders included.
struct StreetGrid {
  Area area;
  std::size_t rows;
  std::size_t cols;

  double x_of(std::size_t col) const { return area.width * static_cast<double>(col) / static_cast<double>(cols); }
  double y_of(std::size_t row) const { return area.height * static_cast<double>(row) / static_cast<double>(rows); }
  /// True if p lies on a street line within tol.
  bool on_street(Vec2 p, double tol = 1e-6) const;
};

std::vector<MobilityTrace> generate_manhattan(const MobilityConfig& config, std::size_t node_count,
                                              SimTime duration, sim::RandomStream& rng);

/// Dispatches on config.model.
std::vector<MobilityTrace> generate(const MobilityConfig& config, std::size_t node_count,
                                    SimTime duration, sim::RandomStream& rng);

// --- trace file ---------------------------------------------------------

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Writes `#manet-trace v1 nodes=N duration=D` followed by
/// `node time x y` lines in ascending node id and time.
void export_trace(std::ostream& out, const std::vector<MobilityTrace>& traces, SimTime duration);

/// Inverse of export_trace. Speeds are recomputed from the geometry.
std::vector<MobilityTrace> parse_trace(std::istream& in);

/// Throws std::invalid_argument if waypoint times do not start at 0 and
/// strictly increase.
void validate_trace(const MobilityTrace& trace);

}  // namespace manet::mobility
