#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace manet {

/// Simulation time in seconds.
using SimTime = double;

using NodeId = std::uint32_t;

inline constexpr NodeId kBroadcast = std::numeric_limits<NodeId>::max();

/// Raised for any invalid configuration value, before a simulation starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace manet
