#pragma once

#include <array>
#include <cstdint>
#include <functional>

#include "manet/packet.hpp"
#include "manet/types.hpp"

namespace manet::energy {

struct EnergyParams {
  double initial_energy = 150.0;  // J
  double idle_power = 1.0;        // W
  double rx_power = 1.1;
  double tx_power = 1.65;
  double transition_power = 0.6;
  double sleep_power = 0.001;
  double transition_time = 0.005;  // s
  double bit_rate = 2e6;           // bits/s

  void validate() const;
};

/// Per-packet transmit energy: power times airtime.
inline double energy_tx(std::uint32_t size_bits, const EnergyParams& p) {
  return p.tx_power * static_cast<double>(size_bits) / p.bit_rate;
}

inline double energy_rx(std::uint32_t size_bits, const EnergyParams& p) {
  return p.rx_power * static_cast<double>(size_bits) / p.bit_rate;
}

enum class RadioState { Idle, Tx, Rx, Sleep, Transition };

enum class Direction { Tx, Rx };

struct EnergyLedger {
  double initial = 0.0;
  double residual = 0.0;
  std::array<double, kLayerCount> tx{};
  std::array<double, kLayerCount> rx{};
  double idle = 0.0;
  double sleep = 0.0;
  double transition = 0.0;
  bool alive = true;
  /// Charges or accruals attempted after death; they change nothing.
  std::uint64_t dead_charges = 0;

  static EnergyLedger with_initial(double joules) {
    EnergyLedger l;
    l.initial = l.residual = joules;
    return l;
  }

  double consumed() const;
  double packet_energy() const;
  double layer_energy(LayerClass layer) const {
    return tx[static_cast<std::size_t>(layer)] + rx[static_cast<std::size_t>(layer)];
  }
};

/// Adds power(state) * duration to Idle, Sleep or Transition. Tx and Rx
/// are charged per packet instead and are rejected here.
void accrue_state(EnergyLedger& ledger, RadioState state, double duration, const EnergyParams& p);

void charge_packet(EnergyLedger& ledger, Direction dir, LayerClass layer, std::uint32_t size_bits,
                   const EnergyParams& p);

/// Time spent per radio state.
struct StateTimes {
  double idle = 0.0;
  double tx = 0.0;
  double rx = 0.0;
  double sleep = 0.0;
  double transition = 0.0;

  double total() const { return idle + tx + rx + sleep + transition; }
};

/// Tracks one node's radio state over time and feeds its ledger. Tx
/// dominates Rx, which dominates Idle; overlapping receptions count once
/// in state time but each frame is charged in full.
class Radio {
 public:
  Radio(EnergyLedger& ledger, const EnergyParams& params, SimTime start = 0.0);

  void begin_tx(SimTime now);
  void end_tx(SimTime now);
  void begin_rx(SimTime now);
  void end_rx(SimTime now);

  /// Enters Sleep through a Transition of transition_time.
  void sleep(SimTime now);
  /// Leaves Sleep through a Transition of transition_time.
  void wake(SimTime now);

  /// Accrues up to `now`; call once at the end of a run.
  void advance(SimTime now);

  void charge(Direction dir, LayerClass layer, std::uint32_t size_bits);

  RadioState state() const;
  bool transmitting() const { return tx_active_; }
  bool alive() const { return ledger_.alive; }
  const StateTimes& times() const { return times_; }
  const EnergyLedger& ledger() const { return ledger_; }

  /// Invoked once, the first time the ledger shows depletion.
  void on_depleted(std::function<void()> callback) { on_depleted_ = std::move(callback); }

 private:
  RadioState base_state() const;
  void accrue(RadioState s, double dt);
  void check_depleted();

  EnergyLedger& ledger_;
  EnergyParams params_;
  SimTime last_ = 0.0;
  bool tx_active_ = false;
  int rx_active_ = 0;
  bool asleep_ = false;
  SimTime transition_until_ = -1.0;
  bool depleted_reported_ = false;
  StateTimes times_;
  std::function<void()> on_depleted_;
};

}  // namespace manet::energy
