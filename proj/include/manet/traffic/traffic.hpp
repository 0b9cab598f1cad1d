#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "manet/sim/random.hpp"
#include "manet/types.hpp"

namespace manet::traffic {

enum class Kind { Cbr, Exponential, Pareto };

struct FlowSpec {
  NodeId source = 0;
  NodeId destination = 1;
  SimTime start = 0.0;
  SimTime stop = 0.0;

  /// Throws ConfigError unless source != destination and
  /// 0 <= start < stop <= duration.
  void validate(SimTime duration) const;
};

struct TrafficConfig {
  Kind kind = Kind::Cbr;
  std::uint32_t packet_size_bits = 4096;  // 512 bytes
  double send_rate = 4.0;                 // packets/s while ON
  double on_mean = 1.5;
  double off_mean = 0.5;
  double pareto_shape = 2.5;

  void validate() const;
};

/// Emission times, strictly increasing, inside [start, stop).
using SendSchedule = std::vector<SimTime>;

SendSchedule cbr_schedule(const FlowSpec& flow, const TrafficConfig& config);

/// ON/OFF source with exponentially distributed periods, starting ON.
SendSchedule exponential_schedule(const FlowSpec& flow, const TrafficConfig& config,
                                  sim::RandomStream& rng);

/// ON/OFF source with Pareto distributed periods of the configured means.
SendSchedule pareto_schedule(const FlowSpec& flow, const TrafficConfig& config,
                             sim::RandomStream& rng);

/// Dispatches on config.kind. CBR ignores the stream.
SendSchedule make_schedule(const FlowSpec& flow, const TrafficConfig& config,
                           sim::RandomStream& rng);

/// Scale giving a Pareto(shape, scale) distribution the requested mean.
double pareto_scale(double mean, double shape);

/// One ON or OFF period length drawn from the configured distribution.
class PeriodSampler {
 public:
  explicit PeriodSampler(const TrafficConfig& config);

  double on(sim::RandomStream& rng) const;
  double off(sim::RandomStream& rng) const;

 private:
  TrafficConfig config_;
  double on_scale_ = 0.0;
  double off_scale_ = 0.0;
};

/// Hill estimate of the tail index from the k largest samples.
double hill_estimator(std::span<const double> samples, std::size_t k);

struct DistributionDiagnostics {
  double on_mean = 0.0;
  double off_mean = 0.0;
  double on_fraction = 0.0;
  double min_on = 0.0;
  double tail_index = 0.0;
};

/// Draws `cycles` ON/OFF pairs and summarizes them; the tail index uses the
/// top 10% of ON samples.
DistributionDiagnostics diagnose(const TrafficConfig& config, std::size_t cycles,
                                 sim::RandomStream& rng);

}  // namespace manet::traffic
