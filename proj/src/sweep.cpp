#include "manet/harness/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "manet/harness/scenario.hpp"
#include "manet/sim/random.hpp"

namespace manet::harness {

const char* const kCsvHeader =
    "protocol,mobility,traffic,speed_mps,seed,routing_tx_j,routing_rx_j,mac_tx_j,mac_rx_j,data_j,idle_j,pdf,"
    "avg_delay_s,throughput_bps";

void SweepGrid::validate() const {
  if (speeds.empty() || protocols.empty() || mobilities.empty() || traffics.empty())
    throw ConfigError("sweep lists must be non-empty");
  for (double v : speeds)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("sweep speeds must be positive");
  if (seeds == 0) throw ConfigError("sweep needs at least one seed");
}

std::vector<SweepCell> expand(const SweepGrid& grid, std::uint64_t base_seed) {
  grid.validate();
  std::vector<SweepCell> cells;
  for (auto p : grid.protocols)
    for (auto m : grid.mobilities)
      for (auto t : grid.traffics)
        for (double v : grid.speeds)
          for (std::size_t k = 0; k < grid.seeds; ++k) cells.push_back({p, m, t, v, base_seed + k});
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

ScenarioConfig cell_config(const ScenarioConfig& base, const SweepCell& cell) {
  ScenarioConfig c = base;
  c.protocol = cell.protocol;
  c.mobility.model = cell.mobility;
  c.traffic.kind = cell.traffic;
  c.speed = cell.speed;
  c.seed = cell.seed;
  return c;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const SweepGrid& grid, const SweepOptions& options) {
  const auto cells = expand(grid, base.seed);
  std::vector<SweepRow> rows(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) rows[i].cell = cells[i];

  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), 0);
  if (options.shuffle_seed) {
    auto rng = sim::derive_stream(*options.shuffle_seed, "sweep-order");
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  }

  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  std::size_t done = 0;
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= order.size()) return;
      SweepRow& row = rows[order[k]];
      try {
        row.report = run_scenario(cell_config(base, row.cell));
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(row, ++done, rows.size());
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(cells.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return {};
  return std::string(buf, ptr);
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const SweepRow& row) {
  const auto& c = row.cell;
  out << routing::to_string(c.protocol) << ',' << to_string(c.mobility) << ',' << to_string(c.traffic) << ','
      << format_number(c.speed) << ',' << c.seed;
  if (!row.report) {
    out << ",,,,,,,,,\n";
    return;
  }
  const auto& r = *row.report;
  const auto& e = r.energy;
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  out << ',' << format_number(e.routing_tx) << ',' << format_number(e.routing_rx) << ',' << format_number(e.mac_tx)
      << ',' << format_number(e.mac_rx) << ',' << format_number(e.data()) << ',' << format_number(e.idle) << ','
      << opt(r.pdf) << ',' << opt(r.avg_delay) << ',' << format_number(r.throughput) << '\n';
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  write_csv_header(out);
  for (const auto& r : rows) write_csv_row(out, r);
}

}  // namespace manet::harness
