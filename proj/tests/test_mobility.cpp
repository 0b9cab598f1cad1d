#include <doctest.h>

#include <cmath>
#include <sstream>

#include "manet/mobility/mobility.hpp"
#include "oracles.hpp"

using namespace manet;
using namespace manet::mobility;

namespace {

MobilityConfig rwp(double lo, double hi) {
  MobilityConfig c;
  c.speed_min = lo;
  c.speed_max = hi;
  return c;
}

}  // namespace

TEST_CASE("position_at: single waypoint is constant") {
  MobilityTrace t{0, 10.0, {{0.0, {0, 0}, 0.0}}};
  CHECK(t.position_at(0.0) == Vec2{0, 0});
  CHECK(t.position_at(7.3) == Vec2{0, 0});
}

TEST_CASE("position_at: linear interpolation and exact endpoints") {
  MobilityTrace t{0, 10.0, {{0.0, {0, 0}, 1.0}, {10.0, {10, 0}, 0.0}}};
  CHECK(t.position_at(5.0) == Vec2{5, 0});
  CHECK(t.position_at(10.0) == Vec2{10, 0});
  MobilityTrace u{0, 3.0, {{0.0, {0.1, 0.2}, 0.0}, {1.0, {0.3, 0.7}, 0.0}, {3.0, {1.0 / 3.0, 2.0 / 3.0}, 0.0}}};
  CHECK(u.position_at(1.0) == Vec2{0.3, 0.7});
  CHECK(u.position_at(3.0) == Vec2{1.0 / 3.0, 2.0 / 3.0});
}

TEST_CASE("position_at: outside the trace is rejected") {
  MobilityTrace t{0, 10.0, {{0.0, {0, 0}, 0.0}}};
  CHECK_THROWS_AS(t.position_at(-0.1), std::out_of_range);
  CHECK_THROWS_AS(t.position_at(10.1), std::out_of_range);
}

TEST_CASE("rwp: zero duration gives the start point only") {
  auto rng = sim::derive_stream(1, "mobility");
  auto traces = generate_rwp(rwp(2, 25), 3, 0.0, rng);
  for (const auto& t : traces) {
    CHECK(t.waypoints.size() == 1);
    CHECK(t.waypoints[0].time == 0.0);
  }
}

TEST_CASE("rwp: zero speed never moves") {
  auto rng = sim::derive_stream(1, "mobility");
  auto traces = generate_rwp(rwp(0, 0), 4, 100.0, rng);
  for (const auto& t : traces) {
    const Vec2 p0 = t.position_at(0.0);
    for (double s = 0; s <= 100.0; s += 7.0) CHECK(t.position_at(s) == p0);
  }
}

TEST_CASE("rwp: leg speeds are uniform on [min, max]") {
  auto rng = sim::derive_stream(2, "mobility");
  auto traces = generate_rwp(rwp(2, 25), 200, 2000.0, rng);
  std::vector<double> speeds;
  for (const auto& t : traces)
    for (std::size_t i = 0; i + 1 < t.waypoints.size(); ++i) {
      const auto& a = t.waypoints[i];
      const auto& b = t.waypoints[i + 1];
      const double implied = distance(a.position, b.position) / (b.time - a.time);
      CHECK(implied >= 2.0 - 1e-9);
      CHECK(implied <= 25.0 + 1e-9);
      if (b.time < t.duration) speeds.push_back(a.speed_to_next);
    }
  REQUIRE(speeds.size() >= 10000);
  speeds.resize(10000);
  CHECK(oracle::mean(speeds) == doctest::Approx(13.5).epsilon(0.02));
}

TEST_CASE("rwp: containment and exact truncation") {
  auto rng = sim::derive_stream(3, "mobility");
  MobilityConfig c = rwp(1, 20);
  c.pause_time = 2.0;
  auto traces = generate_rwp(c, 20, 120.0, rng);
  auto sample = sim::derive_stream(3, "samples");
  for (int k = 0; k < 1000; ++k) {
    const auto& t = traces[sample.below(traces.size())];
    CHECK(c.area.contains(t.position_at(sample.uniform(0.0, 120.0))));
  }
  for (const auto& t : traces) {
    CHECK(t.waypoints.back().time == 120.0);
    CHECK_NOTHROW(validate_trace(t));
  }
}

TEST_CASE("rwp: default speed interval") {
  MobilityConfig c;
  c.mean_speed = 10;
  CHECK(c.speed_range() == std::pair{5.0, 15.0});
  c.mean_speed = 0.1;
  CHECK(c.speed_range().first == 0.1);
}

TEST_CASE("rwp: same seed, same traces") {
  auto a = sim::derive_stream(9, "mobility");
  auto b = sim::derive_stream(9, "mobility");
  auto ta = generate_rwp(rwp(2, 10), 5, 60.0, a);
  auto tb = generate_rwp(rwp(2, 10), 5, 60.0, b);
  for (std::size_t i = 0; i < ta.size(); ++i) {
    REQUIRE(ta[i].waypoints.size() == tb[i].waypoints.size());
    for (std::size_t k = 0; k < ta[i].waypoints.size(); ++k) {
      CHECK(ta[i].waypoints[k].time == tb[i].waypoints[k].time);
      CHECK(ta[i].waypoints[k].position == tb[i].waypoints[k].position);
    }
  }
}

TEST_CASE("rpgm: zero deviation copies the center") {
  MobilityConfig c = rwp(5, 5);
  c.model = Model::ReferencePointGroup;
  c.group_count = 2;
  c.deviation_radius = 0.0;
  auto rng = sim::derive_stream(1, "mobility");
  auto g = generate_rpgm(c, 6, 100.0, rng);
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& center = g.centers[g.group_of[i]];
    for (double t = 0; t <= 100.0; t += 3.3) CHECK(g.nodes[i].position_at(t) == center.position_at(t));
  }
}

TEST_CASE("rpgm: cohesion bound on sampled times") {
  MobilityConfig c = rwp(2, 25);
  c.model = Model::ReferencePointGroup;
  auto rng = sim::derive_stream(4, "mobility");
  auto g = generate_rpgm(c, 50, 120.0, rng);
  auto sample = sim::derive_stream(4, "samples");
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto i = sample.below(50);
    const double t = sample.uniform(0.0, 120.0);
    const double d = distance(g.nodes[i].position_at(t), g.centers[g.group_of[i]].position_at(t));
    worst = std::max(worst, d);
    CHECK(c.area.contains(g.nodes[i].position_at(t)));
  }
  CHECK(worst <= c.deviation_radius + 1e-9);
  CHECK(worst > 0.0);
}

TEST_CASE("rpgm: group assignment with remainder in the last group") {
  MobilityConfig c;
  c.model = Model::ReferencePointGroup;
  c.group_count = 3;
  auto rng = sim::derive_stream(1, "mobility");
  auto g = generate_rpgm(c, 11, 10.0, rng);
  CHECK(g.centers.size() == 3);
  CHECK(g.group_of == std::vector<std::size_t>{0, 0, 0, 1, 1, 1, 2, 2, 2, 2, 2});
}

TEST_CASE("rpgm: more groups than nodes is a configuration error") {
  MobilityConfig c;
  c.model = Model::ReferencePointGroup;
  c.group_count = 5;
  auto rng = sim::derive_stream(1, "mobility");
  CHECK_THROWS_AS(generate_rpgm(c, 4, 10.0, rng), ConfigError);
}

TEST_CASE("rpgm: single group of one node moves like a waypoint walker") {
  MobilityConfig c = rwp(3, 3);
  c.model = Model::ReferencePointGroup;
  c.group_count = 1;
  auto rng = sim::derive_stream(6, "mobility");
  auto g = generate_rpgm(c, 1, 500.0, rng);
  const auto& w = g.centers[0].waypoints;
  REQUIRE(w.size() > 3);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) CHECK(w[i].speed_to_next == doctest::Approx(3.0));
  CHECK(distance(g.nodes[0].position_at(250.0), g.centers[0].position_at(250.0)) <= c.deviation_radius + 1e-9);
}

TEST_CASE("manhattan: turn frequencies at interior intersections") {
  MobilityConfig c;
  c.model = Model::ManhattanGrid;
  c.mean_speed = 10.0;
  auto rng = sim::derive_stream(7, "mobility");
  auto traces = generate_manhattan(c, 100, 1000.0, rng);
  const auto counts = oracle::count_turns(traces, StreetGrid{c.area, c.grid_rows, c.grid_cols});
  REQUIRE(counts.total() >= 10000);
  const double n = static_cast<double>(counts.total());
  CHECK(std::abs(counts.straight / n - 0.50) <= 0.02);
  CHECK(std::abs(counts.left / n - 0.25) <= 0.02);
  CHECK(std::abs(counts.right / n - 0.25) <= 0.02);
}

TEST_CASE("manhattan: positions stay on streets and inside the area") {
  MobilityConfig c;
  c.model = Model::ManhattanGrid;
  c.mean_speed = 15.0;
  auto rng = sim::derive_stream(8, "mobility");
  auto traces = generate_manhattan(c, 30, 120.0, rng);
  const StreetGrid grid{c.area, c.grid_rows, c.grid_cols};
  auto sample = sim::derive_stream(8, "samples");
  for (int k = 0; k < 1000; ++k) {
    const auto p = traces[sample.below(30)].position_at(sample.uniform(0.0, 120.0));
    CHECK(grid.on_street(p));
    CHECK(c.area.contains(p));
  }
}

TEST_CASE("manhattan: a one-block grid keeps nodes on the perimeter") {
  MobilityConfig c;
  c.model = Model::ManhattanGrid;
  c.grid_rows = 1;
  c.grid_cols = 1;
  auto rng = sim::derive_stream(8, "mobility");
  auto traces = generate_manhattan(c, 3, 300.0, rng);
  for (const auto& t : traces)
    for (double s = 0; s <= 300.0; s += 1.7) {
      const auto p = t.position_at(s);
      const bool edge = std::abs(p.x) < 1e-6 || std::abs(p.y) < 1e-6 || std::abs(p.x - 500) < 1e-6 ||
                        std::abs(p.y - 500) < 1e-6;
      CHECK(edge);
    }
}

TEST_CASE("manhattan: speeds respect the floor") {
  MobilityConfig c;
  c.model = Model::ManhattanGrid;
  c.mean_speed = 4.0;
  c.speed_change_prob = 1.0;
  auto rng = sim::derive_stream(8, "mobility");
  auto traces = generate_manhattan(c, 20, 300.0, rng);
  for (const auto& t : traces)
    for (std::size_t i = 0; i + 1 < t.waypoints.size(); ++i)
      CHECK(t.waypoints[i].speed_to_next >= c.manhattan_min_speed() - 1e-12);
}

TEST_CASE("config validation") {
  MobilityConfig c;
  c.speed_min = 5;
  c.speed_max = 2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  MobilityConfig m;
  m.model = Model::ManhattanGrid;
  m.turns = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m.turns = {};
  m.grid_rows = 0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
}

TEST_CASE("trace: empty set round-trips") {
  std::stringstream ss;
  export_trace(ss, {}, 120.0);
  CHECK(ss.str() == "#manet-trace v1 nodes=0 duration=120\n");
  CHECK(parse_trace(ss).empty());
}

TEST_CASE("trace: one node, two waypoints") {
  std::vector<MobilityTrace> in{{0, 10.0, {{0.0, {1, 2}, 0.0}, {10.0, {4, 6}, 0.0}}}};
  std::stringstream ss;
  export_trace(ss, in, 10.0);
  std::string header, l1, l2, extra;
  std::getline(ss, header);
  std::getline(ss, l1);
  std::getline(ss, l2);
  CHECK_FALSE(std::getline(ss, extra));
  ss.clear();
  ss.seekg(0);
  auto out = parse_trace(ss);
  REQUIRE(out.size() == 1);
  REQUIRE(out[0].waypoints.size() == 2);
  CHECK(out[0].waypoints[1].position == Vec2{4, 6});
  CHECK(out[0].waypoints[0].speed_to_next == doctest::Approx(0.5));
}

TEST_CASE("trace: 50-node waypoint scenario round-trips") {
  auto rng = sim::derive_stream(5, "mobility");
  auto in = generate_rwp(rwp(2, 25), 50, 120.0, rng);
  std::stringstream ss;
  export_trace(ss, in, 120.0);
  auto out = parse_trace(ss);
  REQUIRE(out.size() == 50);
  double worst = 0.0;
  for (std::size_t i = 0; i < 50; ++i) {
    REQUIRE(out[i].waypoints.size() == in[i].waypoints.size());
    for (std::size_t k = 0; k < in[i].waypoints.size(); ++k) {
      worst = std::max(worst, distance(out[i].waypoints[k].position, in[i].waypoints[k].position));
      CHECK(std::abs(out[i].waypoints[k].time - in[i].waypoints[k].time) < 1e-9);
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("trace: parse errors name the line") {
  auto fails_at = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      parse_trace(in);
    } catch (const TraceParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(fails_at("") == 1);
  CHECK(fails_at("#bogus v1 nodes=1 duration=1\n") == 1);
  CHECK(fails_at("#manet-trace v1 nodes=1 duration=10\n0 0 1 1\n0 x 1 1\n") == 3);
  CHECK(fails_at("#manet-trace v1 nodes=1 duration=10\n0 0 1 1\n0 5 1 1\n0 5 2 2\n") == 4);
  CHECK(fails_at("#manet-trace v1 nodes=2 duration=10\n0 0 1 1\n") == 2);
  CHECK(fails_at("#manet-trace v1 nodes=1 duration=10\n0 1 1 1\n") == 2);
}

TEST_CASE("trace: validation rejects non-increasing times") {
  MobilityTrace t{0, 10.0, {{0.0, {0, 0}, 0.0}, {5.0, {1, 1}, 0.0}, {5.0, {2, 2}, 0.0}}};
  CHECK_THROWS_AS(validate_trace(t), std::invalid_argument);
}
