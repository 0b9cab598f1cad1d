#include <doctest.h>

#include <cmath>

#include "manet/energy/energy.hpp"
#include "manet/sim/random.hpp"

using namespace manet;
using namespace manet::energy;

namespace {

const EnergyParams kDefaults{};

bool rel_eq(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

double categories(const EnergyLedger& l) {
  double s = l.idle + l.sleep + l.transition;
  for (std::size_t i = 0; i < kLayerCount; ++i) s += l.tx[i] + l.rx[i];
  return s;
}

}  // namespace

TEST_CASE("energy_tx of a 4096-bit packet") {
  CHECK(rel_eq(energy_tx(4096, kDefaults), 3.3792e-3, 1e-12));
}

TEST_CASE("energy_rx of a 4096-bit packet") {
  CHECK(rel_eq(energy_rx(4096, kDefaults), 2.2528e-3, 1e-12));
  CHECK(energy_rx(4096, kDefaults) < energy_tx(4096, kDefaults));
}

TEST_CASE("per-packet energy is linear and vanishes at zero size") {
  CHECK(energy_tx(0, kDefaults) == 0.0);
  CHECK(energy_rx(0, kDefaults) == 0.0);
  CHECK(energy_tx(8192, kDefaults) == doctest::Approx(2 * energy_tx(4096, kDefaults)).epsilon(1e-15));
  CHECK(energy_rx(1000, kDefaults) == doctest::Approx(10 * energy_rx(100, kDefaults)).epsilon(1e-15));
}

TEST_CASE("accrue_state: idle, sleep and zero duration") {
  auto l = EnergyLedger::with_initial(150.0);
  accrue_state(l, RadioState::Idle, 1.0, kDefaults);
  CHECK(l.idle == doctest::Approx(1.0).epsilon(1e-15));
  accrue_state(l, RadioState::Sleep, 100.0, kDefaults);
  CHECK(l.sleep == doctest::Approx(0.1).epsilon(1e-12));
  const auto before = l;
  accrue_state(l, RadioState::Idle, 0.0, kDefaults);
  CHECK(l.idle == before.idle);
  CHECK(l.residual == before.residual);
  CHECK_THROWS(accrue_state(l, RadioState::Tx, 1.0, kDefaults));
  CHECK_THROWS(accrue_state(l, RadioState::Idle, -1.0, kDefaults));
}

TEST_CASE("charge_packet: ACK reception and RREQ transmission") {
  auto l = EnergyLedger::with_initial(150.0);
  charge_packet(l, Direction::Rx, LayerClass::MacControl, 304, kDefaults);
  CHECK(rel_eq(l.rx[1], 1.672e-4, 1e-12));
  charge_packet(l, Direction::Tx, LayerClass::RoutingControl, 192, kDefaults);
  CHECK(rel_eq(l.tx[0], 1.584e-4, 1e-12));
  CHECK(l.tx[2] == 0.0);
  CHECK(std::abs(l.initial - l.residual - categories(l)) < 1e-12);
}

TEST_CASE("charging a dead node changes nothing") {
  auto l = EnergyLedger::with_initial(1e-3);
  charge_packet(l, Direction::Tx, LayerClass::Data, 4096, kDefaults);
  CHECK_FALSE(l.alive);
  const auto before = l;
  charge_packet(l, Direction::Rx, LayerClass::RoutingControl, 4096, kDefaults);
  accrue_state(l, RadioState::Idle, 10.0, kDefaults);
  CHECK(l.tx == before.tx);
  CHECK(l.rx == before.rx);
  CHECK(l.idle == before.idle);
  CHECK(l.residual == before.residual);
  CHECK(l.dead_charges == 2);
}

TEST_CASE("ledger balance over a random mix of charges") {
  auto l = EnergyLedger::with_initial(150.0);
  auto rng = sim::derive_stream(1, "energy");
  for (int i = 0; i < 20000; ++i) {
    const auto layer = static_cast<LayerClass>(rng.below(3));
    const auto bits = static_cast<std::uint32_t>(1 + rng.below(8000));
    charge_packet(l, rng.below(2) ? Direction::Tx : Direction::Rx, layer, bits, kDefaults);
    accrue_state(l, RadioState::Idle, rng.uniform(0.0, 1e-3), kDefaults);
  }
  REQUIRE(l.alive);
  CHECK(std::abs(l.initial - l.residual - categories(l)) < 1e-9);
  CHECK(std::abs(l.consumed() - categories(l)) < 1e-9);
  CHECK(std::abs(l.packet_energy() - (l.layer_energy(LayerClass::RoutingControl) +
                                      l.layer_energy(LayerClass::MacControl) + l.layer_energy(LayerClass::Data))) <
        1e-12);
}

TEST_CASE("radio: tx and rx time are not accrued as idle") {
  auto l = EnergyLedger::with_initial(150.0);
  Radio r(l, kDefaults);
  r.begin_tx(1.0);
  r.charge(Direction::Tx, LayerClass::Data, 4096);
  r.end_tx(1.002048);
  r.begin_rx(2.0);
  r.begin_rx(2.001);
  r.end_rx(2.002);
  r.end_rx(2.003);
  r.advance(10.0);
  CHECK(r.times().tx == doctest::Approx(0.002048));
  CHECK(r.times().rx == doctest::Approx(0.003));
  CHECK(std::abs(r.times().total() - 10.0) < 1e-12);
  CHECK(l.idle == doctest::Approx(10.0 - 0.002048 - 0.003).epsilon(1e-12));
  CHECK(std::abs(l.initial - l.residual - categories(l)) < 1e-12);
}

TEST_CASE("radio: sleep and wake pass through transitions") {
  auto l = EnergyLedger::with_initial(150.0);
  Radio r(l, kDefaults);
  r.sleep(1.0);
  CHECK(r.state() == RadioState::Transition);
  r.advance(1.005);
  CHECK(r.state() == RadioState::Sleep);
  r.wake(101.0);
  r.advance(102.0);
  CHECK(r.state() == RadioState::Idle);
  CHECK(r.times().transition == doctest::Approx(0.010));
  CHECK(r.times().sleep == doctest::Approx(99.995));
  CHECK(l.transition == doctest::Approx(0.6 * 0.010));
  CHECK(l.sleep == doctest::Approx(0.001 * 99.995));
  CHECK(l.idle == doctest::Approx(1.0 + 0.995));
  CHECK(std::abs(r.times().total() - 102.0) < 1e-12);
}

TEST_CASE("radio: depletion fires once and stops accrual") {
  auto l = EnergyLedger::with_initial(2.0);
  Radio r(l, kDefaults);
  int deaths = 0;
  r.on_depleted([&] { ++deaths; });
  r.advance(1.5);
  CHECK(deaths == 0);
  r.advance(3.0);
  CHECK(deaths == 1);
  CHECK_FALSE(r.alive());
  const double spent = l.initial - l.residual;
  r.advance(10.0);
  r.charge(Direction::Tx, LayerClass::Data, 4096);
  CHECK(deaths == 1);
  CHECK(l.initial - l.residual == spent);
}

TEST_CASE("params validation") {
  EnergyParams p;
  p.bit_rate = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.tx_power = -1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  CHECK(p.sleep_power <= p.idle_power);
  CHECK(p.idle_power <= p.rx_power);
  CHECK(p.rx_power <= p.tx_power);
}
