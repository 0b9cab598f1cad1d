#include "manet/traffic/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace manet::traffic {

void FlowSpec::validate(SimTime duration) const {
  if (source == destination) throw ConfigError("flow source equals destination");
  if (!(start >= 0.0 && start < stop && stop <= duration))
    throw ConfigError("flow window must satisfy 0 <= start < stop <= duration");
}

void TrafficConfig::validate() const {
  if (packet_size_bits == 0) throw ConfigError("packet size must be positive");
  if (!(send_rate > 0.0)) throw ConfigError("send rate must be positive");
  if (kind != Kind::Cbr) {
    if (!(on_mean > 0.0 && off_mean > 0.0)) throw ConfigError("ON/OFF means must be positive");
    if (kind == Kind::Pareto && !(pareto_shape > 1.0))
      throw ConfigError("Pareto shape must exceed 1 for a finite mean");
  }
}

double pareto_scale(double mean, double shape) {
  if (!(shape > 1.0)) throw ConfigError("Pareto shape must exceed 1 for a finite mean");
  if (!(mean > 0.0)) throw ConfigError("Pareto mean must be positive");
  return mean * (shape - 1.0) / shape;
}

SendSchedule cbr_schedule(const FlowSpec& flow, const TrafficConfig& config) {
  config.validate();
  if (!(flow.start < flow.stop)) throw ConfigError("flow window must satisfy start < stop");
  SendSchedule out;
  const double interval = 1.0 / config.send_rate;
  for (std::uint64_t k = 0;; ++k) {
    const SimTime t = flow.start + static_cast<double>(k) * interval;
    if (!(t < flow.stop)) break;
    out.push_back(t);
  }
  return out;
}

PeriodSampler::PeriodSampler(const TrafficConfig& config) : config_(config) {
  config.validate();
  if (config.kind == Kind::Pareto) {
    on_scale_ = pareto_scale(config.on_mean, config.pareto_shape);
    off_scale_ = pareto_scale(config.off_mean, config.pareto_shape);
  }
}

double PeriodSampler::on(sim::RandomStream& rng) const {
  if (config_.kind == Kind::Pareto) return rng.pareto(config_.pareto_shape, on_scale_);
  return rng.exponential(config_.on_mean);
}

double PeriodSampler::off(sim::RandomStream& rng) const {
  if (config_.kind == Kind::Pareto) return rng.pareto(config_.pareto_shape, off_scale_);
  return rng.exponential(config_.off_mean);
}

namespace {

// Each ON period restarts the 1/rate grid at its own start. A slot is used
// when at least half of it lies inside the period, and a non-empty period
// always sends once, so the long-run count matches CBR as OFF -> 0.
SendSchedule on_off_schedule(const FlowSpec& flow, const TrafficConfig& config,
                             const PeriodSampler& sampler, sim::RandomStream& rng) {
  if (!(flow.start < flow.stop)) throw ConfigError("flow window must satisfy start < stop");
  SendSchedule out;
  const double interval = 1.0 / config.send_rate;
  SimTime t = flow.start;
  while (t < flow.stop) {
    const double on = sampler.on(rng);
    const double off = sampler.off(rng);
    if (on > 0.0) {
      const auto slots = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(on * config.send_rate + 0.5)));
      for (std::uint64_t k = 0; k < slots; ++k) {
        const SimTime e = t + static_cast<double>(k) * interval;
        if (!(e < flow.stop)) break;
        if (out.empty() || e > out.back()) out.push_back(e);
      }
    }
    t += on + off;
  }
  return out;
}

}  // namespace

SendSchedule exponential_schedule(const FlowSpec& flow, const TrafficConfig& config,
                                  sim::RandomStream& rng) {
  if (config.kind != Kind::Exponential) throw ConfigError("exponential_schedule needs kind Exponential");
  return on_off_schedule(flow, config, PeriodSampler(config), rng);
}

SendSchedule pareto_schedule(const FlowSpec& flow, const TrafficConfig& config,
                             sim::RandomStream& rng) {
  if (config.kind != Kind::Pareto) throw ConfigError("pareto_schedule needs kind Pareto");
  return on_off_schedule(flow, config, PeriodSampler(config), rng);
}

SendSchedule make_schedule(const FlowSpec& flow, const TrafficConfig& config, sim::RandomStream& rng) {
  switch (config.kind) {
    case Kind::Cbr:
      return cbr_schedule(flow, config);
    case Kind::Exponential:
      return exponential_schedule(flow, config, rng);
    case Kind::Pareto:
      return pareto_schedule(flow, config, rng);
  }
  throw ConfigError("unknown traffic kind");
}

double hill_estimator(std::span<const double> samples, std::size_t k) {
  if (k == 0 || k >= samples.size()) throw std::invalid_argument("hill_estimator: need 0 < k < n");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end(),
                   std::greater<>());
  const double threshold = sorted[k];
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(sorted[i] / threshold);
  return static_cast<double>(k) / sum;
}

DistributionDiagnostics diagnose(const TrafficConfig& config, std::size_t cycles,
                                 sim::RandomStream& rng) {
  const PeriodSampler sampler(config);
  std::vector<double> ons;
  ons.reserve(cycles);
  double on_total = 0.0;
  double off_total = 0.0;
  for (std::size_t i = 0; i < cycles; ++i) {
    const double on = sampler.on(rng);
    const double off = sampler.off(rng);
    ons.push_back(on);
    on_total += on;
    off_total += off;
  }
  DistributionDiagnostics d;
  if (cycles == 0) return d;
  d.on_mean = on_total / static_cast<double>(cycles);
  d.off_mean = off_total / static_cast<double>(cycles);
  d.on_fraction = on_total / (on_total + off_total);
  d.min_on = *std::min_element(ons.begin(), ons.end());
  if (cycles >= 20) d.tail_index = hill_estimator(ons, cycles / 10);
  return d;
}

}  // namespace manet::traffic
