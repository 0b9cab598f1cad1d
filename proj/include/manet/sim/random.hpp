#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace manet::sim {

/// A seeded pseudo-random stream.
///
/// The engine is std::mt19937_64; the variate transforms are written out here
/// instead of using <random> distributions, whose output is
/// implementation-defined, so that traces are reproducible across standard
/// libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  double exponential(double mean);

  /// Pareto with the given shape and scale; support is [scale, inf).
  double pareto(double shape, double scale);

  double normal(double mean, double stddev);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent named sub-stream from a master seed, so that e.g.
/// the mobility stream does not shift when the traffic model changes.
RandomStream derive_stream(std::uint64_t master_seed, std::string_view name);

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view name);

}  // namespace manet::sim
