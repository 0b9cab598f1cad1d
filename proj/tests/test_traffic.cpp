#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "manet/traffic/traffic.hpp"
#include "oracles.hpp"

using namespace manet;
using namespace manet::traffic;

namespace {

TrafficConfig kind(Kind k) {
  TrafficConfig c;
  c.kind = k;
  return c;
}

}  // namespace

TEST_CASE("cbr: arithmetic progression below stop") {
  auto s = cbr_schedule({0, 1, 0.0, 1.0}, kind(Kind::Cbr));
  CHECK(s == SendSchedule{0.0, 0.25, 0.5, 0.75});
}

TEST_CASE("cbr: empty window is invalid") {
  CHECK_THROWS_AS(cbr_schedule({0, 1, 3.0, 3.0}, kind(Kind::Cbr)), ConfigError);
  CHECK_THROWS_AS(FlowSpec({0, 1, 3.0, 3.0}).validate(120.0), ConfigError);
  CHECK_THROWS_AS(FlowSpec({2, 2, 0.0, 3.0}).validate(120.0), ConfigError);
  CHECK_THROWS_AS(FlowSpec({0, 1, 0.0, 130.0}).validate(120.0), ConfigError);
  CHECK_NOTHROW(FlowSpec({0, 1, 0.0, 120.0}).validate(120.0));
}

TEST_CASE("cbr: 4 pkt/s over 120 s gives 480 emissions") {
  auto s = cbr_schedule({0, 1, 0.0, 120.0}, kind(Kind::Cbr));
  CHECK(s.size() == static_cast<std::size_t>(std::floor(4.0 * 120.0)));
}

TEST_CASE("exponential: vanishing OFF approaches CBR") {
  auto cfg = kind(Kind::Exponential);
  cfg.off_mean = 1e-6;
  auto rng = sim::derive_stream(1, "traffic");
  const double cbr = static_cast<double>(cbr_schedule({0, 1, 0.0, 120.0}, cfg).size());
  const double onoff = static_cast<double>(exponential_schedule({0, 1, 0.0, 120.0}, cfg, rng).size());
  CHECK(std::abs(onoff - cbr) / cbr <= 0.05);
}

TEST_CASE("exponential: ON mean and long-run ON fraction") {
  auto rng = sim::derive_stream(2, "traffic");
  const PeriodSampler sampler(kind(Kind::Exponential));
  double on = 0.0, off = 0.0, on_first = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double a = sampler.on(rng);
    const double b = sampler.off(rng);
    on += a;
    off += b;
    if (i < 10000) on_first += a;
  }
  CHECK(std::abs(on / 1e5 - 1.5) / 1.5 <= 0.05);
  CHECK(std::abs(off / 1e5 - 0.5) / 0.5 <= 0.05);
  CHECK(std::abs(on / (on + off) - 0.75) <= 0.02 * 0.75);
  CHECK(on_first > 0.0);
}

TEST_CASE("exponential: schedule starts ON and stays in the window") {
  auto rng = sim::derive_stream(3, "traffic");
  auto s = exponential_schedule({0, 1, 2.0, 60.0}, kind(Kind::Exponential), rng);
  REQUIRE_FALSE(s.empty());
  CHECK(s.front() == 2.0);
  CHECK(s.back() < 60.0);
  CHECK(std::is_sorted(s.begin(), s.end()));
  CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] - s[i - 1] >= 0.25 - 1e-12);
}

TEST_CASE("on/off emissions sit on a grid restarted at each burst") {
  auto rng = sim::derive_stream(4, "traffic");
  auto s = pareto_schedule({0, 1, 0.0, 120.0}, kind(Kind::Pareto), rng);
  std::size_t restarts = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double gap = s[i] - s[i - 1];
    if (std::abs(gap - 0.25) > 1e-9) {
      CHECK(gap > 0.25);
      ++restarts;
    }
  }
  CHECK(restarts > 10);
}

TEST_CASE("on/off sends about 3/4 of CBR over a long window") {
  auto rng = sim::derive_stream(5, "traffic");
  const double cbr = static_cast<double>(cbr_schedule({0, 1, 0.0, 10000.0}, kind(Kind::Cbr)).size());
  const double exp = static_cast<double>(exponential_schedule({0, 1, 0.0, 10000.0}, kind(Kind::Exponential), rng).size());
  CHECK(exp / cbr == doctest::Approx(0.75).epsilon(0.05));
}

TEST_CASE("pareto_scale: mean identity") {
  CHECK(pareto_scale(1.5, 2.5) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(pareto_scale(0.5, 2.5) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(std::abs(pareto_scale(1.5, 1e6) - 1.5) <= 1e-5);
  CHECK_THROWS_AS(pareto_scale(1.5, 1.0), ConfigError);
  CHECK_THROWS_AS(pareto_scale(1.5, 0.5), ConfigError);
}

TEST_CASE("pareto: ON mean, support bound and tail index") {
  auto rng = sim::derive_stream(6, "traffic");
  const PeriodSampler sampler(kind(Kind::Pareto));
  std::vector<double> ons;
  double off = 0.0;
  for (int i = 0; i < 100000; ++i) {
    ons.push_back(sampler.on(rng));
    off += sampler.off(rng);
  }
  CHECK(std::abs(oracle::mean(ons) - 1.5) / 1.5 <= 0.05);
  CHECK(std::abs(off / 1e5 - 0.5) / 0.5 <= 0.05);
  CHECK(*std::min_element(ons.begin(), ons.end()) >= 0.9);

  // Hill estimate over the top 10%, computed from a full sort.
  std::vector<double> sorted = ons;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const std::size_t k = sorted.size() / 10;
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(sorted[i] / sorted[k]);
  const double hill = static_cast<double>(k) / sum;
  CHECK(std::abs(hill - 2.5) <= 0.15);
  CHECK(hill_estimator(ons, k) == doctest::Approx(hill).epsilon(1e-12));
}

TEST_CASE("diagnose summarizes the sampler") {
  auto rng = sim::derive_stream(7, "traffic");
  const auto d = diagnose(kind(Kind::Pareto), 100000, rng);
  CHECK(std::abs(d.on_mean - 1.5) / 1.5 <= 0.05);
  CHECK(std::abs(d.on_fraction - 0.75) <= 0.02 * 0.75);
  CHECK(d.min_on >= 0.9);
  CHECK(std::abs(d.tail_index - 2.5) <= 0.15);
}

TEST_CASE("kind must match the schedule") {
  auto rng = sim::derive_stream(1, "traffic");
  CHECK_THROWS_AS(exponential_schedule({0, 1, 0.0, 1.0}, kind(Kind::Pareto), rng), ConfigError);
  CHECK_THROWS_AS(pareto_schedule({0, 1, 0.0, 1.0}, kind(Kind::Exponential), rng), ConfigError);
}

TEST_CASE("config validation") {
  TrafficConfig c;
  c.send_rate = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = kind(Kind::Pareto);
  c.pareto_shape = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = kind(Kind::Exponential);
  c.on_mean = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = TrafficConfig{};
  c.packet_size_bits = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("same stream, same schedule") {
  auto a = sim::derive_stream(8, "traffic");
  auto b = sim::derive_stream(8, "traffic");
  CHECK(make_schedule({0, 1, 0.0, 60.0}, kind(Kind::Exponential), a) ==
        make_schedule({0, 1, 0.0, 60.0}, kind(Kind::Exponential), b));
}
