#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "manet/sim/engine.hpp"
#include "manet/sim/random.hpp"

using namespace manet;
using namespace manet::sim;

TEST_CASE("queue: single event") {
  EventQueue q;
  q.push(1.0, {}, [] {});
  CHECK(q.size() == 1);
  CHECK(q.head_time() == 1.0);
}

TEST_CASE("queue: pops by time, not insertion") {
  EventQueue q;
  q.push(2.0, {}, [] {});
  q.push(1.0, {}, [] {});
  auto a = q.pop();
  auto b = q.pop();
  CHECK(a.time == 1.0);
  CHECK(a.seq == 2);
  CHECK(b.time == 2.0);
  CHECK(b.seq == 1);
}

TEST_CASE("queue: equal times are FIFO") {
  EventQueue q;
  q.push(1.0, {"A"}, [] {});
  q.push(1.0, {"B"}, [] {});
  CHECK(q.pop().tag.kind == "A");
  CHECK(q.pop().tag.kind == "B");
}

TEST_CASE("queue: sequence numbers strictly increase") {
  EventQueue q;
  std::uint64_t last = 0;
  for (int i = 0; i < 100; ++i) {
    auto h = q.push(static_cast<double>(100 - i), {}, [] {});
    CHECK(h.seq > last);
    last = h.seq;
  }
}

TEST_CASE("queue: scheduling in the past is rejected") {
  EventQueue q;
  q.push(5.0, {}, [] {});
  q.pop();
  CHECK_THROWS_AS(q.push(4.0, {}, [] {}), ClockViolation);
}

TEST_CASE("queue: cancellation") {
  EventQueue q;
  auto h = q.push(1.0, {"x"}, [] {});
  q.push(2.0, {"y"}, [] {});
  CHECK(q.cancel(h));
  CHECK_FALSE(q.cancel(h));
  CHECK(q.size() == 1);
  CHECK(q.pop().tag.kind == "y");
  CHECK(q.empty());
}

TEST_CASE("engine: empty run advances the clock") {
  Engine e(120.0);
  const auto& log = e.run(120.0);
  CHECK(log.empty());
  CHECK(e.now() == 120.0);
}

TEST_CASE("engine: run boundary is inclusive") {
  Engine e(10.0);
  std::vector<double> fired;
  for (double t : {1.0, 2.0, 3.0}) e.schedule(t, {}, [&fired, t] { fired.push_back(t); });
  const auto& log = e.run(2.0);
  CHECK(log.size() == 2);
  CHECK(fired == std::vector<double>{1.0, 2.0});
  CHECK(e.now() == 2.0);
  e.run(10.0);
  CHECK(fired.size() == 3);
}

TEST_CASE("engine: cancelled events never run") {
  Engine e(10.0);
  bool ran = false;
  auto h = e.schedule(1.0, {"victim"}, [&] { ran = true; });
  e.schedule(0.5, {"killer"}, [&] { e.cancel(h); });
  e.run(10.0);
  CHECK_FALSE(ran);
  for (const auto& entry : e.log()) CHECK(entry.tag.kind != "victim");
}

TEST_CASE("engine: handler scheduling into the past names the handler") {
  Engine e(10.0);
  e.schedule(2.0, {"culprit", 7}, [&] { e.schedule(1.0, {}, [] {}); });
  try {
    e.run(10.0);
    FAIL("expected a clock violation");
  } catch (const ClockViolation& err) {
    const std::string msg = err.what();
    CHECK(msg.find("culprit") != std::string::npos);
    CHECK(msg.find("node 7") != std::string::npos);
  }
}

TEST_CASE("engine: run beyond the horizon is rejected") {
  Engine e(5.0);
  CHECK_THROWS_AS(e.run(6.0), ClockViolation);
}

TEST_CASE("engine: clock is monotone over a random workload") {
  Engine e(100.0);
  auto rng = derive_stream(3, "workload");
  std::function<void()> spawn = [&] {
    if (e.now() < 90.0) {
      e.schedule_in(rng.uniform(0.0, 2.0), {"spawn"}, spawn);
      if (rng.uniform() < 0.3) e.schedule_in(0.0, {"zero"}, [] {});
    }
  };
  for (int i = 0; i < 10; ++i) e.schedule(rng.uniform(0.0, 5.0), {"seed"}, spawn);
  e.run(100.0);
  const auto& log = e.log();
  REQUIRE(log.size() > 100);
  for (std::size_t i = 1; i < log.size(); ++i) {
    CHECK(log[i - 1].time <= log[i].time);
    if (log[i - 1].time == log[i].time) CHECK(log[i - 1].seq < log[i].seq);
  }
}

namespace {

EventLog seeded_run(std::uint64_t seed) {
  Engine e(50.0);
  auto rng = derive_stream(seed, "workload");
  std::function<void()> tick = [&] {
    if (e.now() < 45.0) e.schedule_in(rng.exponential(0.5), {"tick", static_cast<NodeId>(rng.below(4))}, tick);
  };
  for (int i = 0; i < 4; ++i) e.schedule(rng.uniform(0.0, 1.0), {"start", static_cast<NodeId>(i)}, tick);
  e.run(50.0);
  return e.log();
}

}  // namespace

TEST_CASE("engine: identical seeds give identical logs") {
  const auto a = seeded_run(11);
  const auto b = seeded_run(11);
  CHECK(a == b);
  std::ostringstream sa, sb;
  write_event_log(sa, a);
  write_event_log(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK_FALSE(seeded_run(12) == a);
}

TEST_CASE("event log line format") {
  EventLog log{{1.5, 1, {"tx", 3, 9}}, {2.0, 2, {"global"}}};
  std::ostringstream os;
  write_event_log(os, log);
  CHECK(os.str() == "1.500000000 tx 3 9\n2.000000000 global - 0\n");
}

TEST_CASE("random: named streams are independent and reproducible") {
  auto a = derive_stream(1, "mobility");
  auto b = derive_stream(1, "mobility");
  auto c = derive_stream(1, "traffic");
  const double x = a.uniform();
  CHECK(x == b.uniform());
  CHECK(x != c.uniform());
  CHECK(derive_seed(1, "mac/0") != derive_seed(1, "mac/1"));
  CHECK(derive_seed(1, "mac/0") != derive_seed(2, "mac/0"));
}

TEST_CASE("random: uniform moments") {
  auto rng = derive_stream(5, "u");
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sq += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sq / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12.0).epsilon(0.01));
}

TEST_CASE("random: below covers its range uniformly") {
  auto rng = derive_stream(5, "below");
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
  for (int c : counts) CHECK(c == doctest::Approx(10000).epsilon(0.05));
  CHECK_THROWS(rng.below(0));
}

TEST_CASE("random: exponential and normal moments") {
  auto rng = derive_stream(5, "moments");
  const int n = 200000;
  double se = 0.0, sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    se += rng.exponential(2.0);
    const double z = rng.normal(1.0, 3.0);
    sn += z;
    sn2 += z * z;
  }
  CHECK(se / n == doctest::Approx(2.0).epsilon(0.02));
  const double mean = sn / n;
  CHECK(mean == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::sqrt(sn2 / n - mean * mean) == doctest::Approx(3.0).epsilon(0.02));
}
