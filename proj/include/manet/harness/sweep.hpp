#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "manet/harness/config.hpp"
#include "manet/harness/metrics.hpp"

namespace manet::harness {

struct SweepGrid {
  std::vector<double> speeds{2, 5, 10, 15, 20, 25};
  std::vector<routing::Protocol> protocols{routing::Protocol::Aodv, routing::Protocol::Dsr, routing::Protocol::Dsdv};
  std::vector<mobility::Model> mobilities{mobility::Model::RandomWaypoint, mobility::Model::ReferencePointGroup,
                                          mobility::Model::ManhattanGrid};
  std::vector<traffic::Kind> traffics{traffic::Kind::Cbr, traffic::Kind::Exponential, traffic::Kind::Pareto};
  std::size_t seeds = 5;

  void validate() const;
};

struct SweepCell {
  routing::Protocol protocol;
  mobility::Model mobility;
  traffic::Kind traffic;
  double speed;
  std::uint64_t seed;

  auto key() const { return std::tuple(protocol, mobility, traffic, speed, seed); }
  bool operator<(const SweepCell& o) const { return key() < o.key(); }
  bool operator==(const SweepCell& o) const { return key() == o.key(); }
};

struct SweepRow {
  SweepCell cell;
  std::optional<MetricsReport> report;
  std::string error;
};

/// Cells in canonical order. Seeds are base_seed, base_seed + 1, ...
std::vector<SweepCell> expand(const SweepGrid& grid, std::uint64_t base_seed);

ScenarioConfig cell_config(const ScenarioConfig& base, const SweepCell& cell);

struct SweepOptions {
  unsigned jobs = 1;
  /// If set, cells are executed in an order shuffled with this seed.
  std::optional<std::uint64_t> shuffle_seed;
  /// Called after each cell completes (from worker threads, serialized).
  std::function<void(const SweepRow&, std::size_t done, std::size_t total)> progress;
};

/// Runs every cell. Failures are captured per row; rows come back in
/// canonical order whatever the execution order.
std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const SweepGrid& grid, const SweepOptions& options = {});

extern const char* const kCsvHeader;

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const SweepRow& row);
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Shortest decimal that round-trips to the same double.
std::string format_number(double v);

}  // namespace manet::harness
