#include "manet/energy/energy.hpp"

#include <algorithm>
#include <stdexcept>

namespace manet::energy {

void EnergyParams::validate() const {
  if (!(initial_energy > 0.0)) throw ConfigError("initial energy must be positive");
  if (idle_power < 0 || rx_power < 0 || tx_power < 0 || transition_power < 0 || sleep_power < 0)
    throw ConfigError("radio powers must be non-negative");
  if (!(transition_time >= 0.0)) throw ConfigError("transition time must be non-negative");
  if (!(bit_rate > 0.0)) throw ConfigError("bit rate must be positive");
}

double EnergyLedger::consumed() const {
  return packet_energy() + idle + sleep + transition;
}

double EnergyLedger::packet_energy() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < kLayerCount; ++i) sum += tx[i] + rx[i];
  return sum;
}

namespace {

void debit(EnergyLedger& ledger, double& category, double joules) {
  category += joules;
  ledger.residual -= joules;
  if (ledger.residual <= 0.0) ledger.alive = false;
}

}  // namespace

void accrue_state(EnergyLedger& ledger, RadioState state, double duration, const EnergyParams& p) {
  if (!(duration >= 0.0)) throw std::invalid_argument("accrue_state: negative duration");
  if (!ledger.alive) {
    ++ledger.dead_charges;
    return;
  }
  if (duration == 0.0) return;
  switch (state) {
    case RadioState::Idle:
      debit(ledger, ledger.idle, p.idle_power * duration);
      return;
    case RadioState::Sleep:
      debit(ledger, ledger.sleep, p.sleep_power * duration);
      return;
    case RadioState::Transition:
      debit(ledger, ledger.transition, p.transition_power * duration);
      return;
    case RadioState::Tx:
    case RadioState::Rx:
      break;
  }
  throw std::invalid_argument("accrue_state: Tx/Rx energy is charged per packet");
}

void charge_packet(EnergyLedger& ledger, Direction dir, LayerClass layer, std::uint32_t size_bits,
                   const EnergyParams& p) {
  if (!ledger.alive) {
    ++ledger.dead_charges;
    return;
  }
  const auto i = static_cast<std::size_t>(layer);
  if (dir == Direction::Tx)
    debit(ledger, ledger.tx[i], energy_tx(size_bits, p));
  else
    debit(ledger, ledger.rx[i], energy_rx(size_bits, p));
}

Radio::Radio(EnergyLedger& ledger, const EnergyParams& params, SimTime start)
    : ledger_(ledger), params_(params), last_(start) {}

RadioState Radio::base_state() const {
  if (tx_active_) return RadioState::Tx;
  if (rx_active_ > 0) return RadioState::Rx;
  if (transition_until_ > last_) return RadioState::Transition;
  return asleep_ ? RadioState::Sleep : RadioState::Idle;
}

RadioState Radio::state() const { return base_state(); }

void Radio::accrue(RadioState s, double dt) {
  switch (s) {
    case RadioState::Idle:
      times_.idle += dt;
      break;
    case RadioState::Tx:
      times_.tx += dt;
      return;
    case RadioState::Rx:
      times_.rx += dt;
      return;
    case RadioState::Sleep:
      times_.sleep += dt;
      break;
    case RadioState::Transition:
      times_.transition += dt;
      break;
  }
  accrue_state(ledger_, s, dt, params_);
}

void Radio::advance(SimTime now) {
  if (now < last_) throw std::logic_error("Radio::advance: time went backwards");
  if (!ledger_.alive) {
    last_ = now;
    return;
  }
  while (last_ < now) {
    const RadioState s = base_state();
    SimTime seg_end = now;
    if (s == RadioState::Transition) seg_end = std::min(now, transition_until_);
    accrue(s, seg_end - last_);
    last_ = seg_end;
    if (!ledger_.alive) {
      last_ = now;
      break;
    }
  }
  check_depleted();
}

void Radio::begin_tx(SimTime now) {
  advance(now);
  tx_active_ = true;
}

void Radio::end_tx(SimTime now) {
  advance(now);
  tx_active_ = false;
}

void Radio::begin_rx(SimTime now) {
  advance(now);
  ++rx_active_;
}

void Radio::end_rx(SimTime now) {
  advance(now);
  if (rx_active_ > 0) --rx_active_;
}

void Radio::sleep(SimTime now) {
  advance(now);
  if (asleep_) return;
  asleep_ = true;
  transition_until_ = now + params_.transition_time;
}

void Radio::wake(SimTime now) {
  advance(now);
  if (!asleep_) return;
  asleep_ = false;
  transition_until_ = now + params_.transition_time;
}

void Radio::charge(Direction dir, LayerClass layer, std::uint32_t size_bits) {
  charge_packet(ledger_, dir, layer, size_bits, params_);
  check_depleted();
}

void Radio::check_depleted() {
  if (!ledger_.alive && !depleted_reported_) {
    depleted_reported_ = true;
    if (on_depleted_) on_depleted_();
  }
}

}  // namespace manet::energy
