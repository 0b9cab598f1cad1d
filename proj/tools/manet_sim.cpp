// Command-line front end: run, sweep, gen-mobility, validate-traffic.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "manet/harness/config.hpp"
#include "manet/harness/metrics.hpp"
#include "manet/harness/scenario.hpp"
#include "manet/harness/sweep.hpp"
#include "manet/mobility/mobility.hpp"
#include "manet/sim/random.hpp"
#include "manet/traffic/traffic.hpp"

namespace {

using namespace manet;
using namespace manet::harness;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kFailure = 2;

class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  if (out.empty()) throw ConfigError("empty list '" + s + "'");
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeFailure("cannot write '" + path + "'");
  return out;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& event_log,
            const std::string& protocol_log, const std::string& csv) {
  ScenarioConfig cfg = load_config(config_path);
  if (seed) cfg.seed = *seed;
  cfg.validate();
  std::ofstream ev, pl;
  RunOptions opts;
  if (!event_log.empty()) {
    ev = open_out(event_log);
    opts.event_log = &ev;
  }
  if (!protocol_log.empty()) {
    pl = open_out(protocol_log);
    opts.protocol_log = &pl;
  }
  MetricsReport report = run_scenario(cfg, opts);
  if (!csv.empty()) {
    auto out = open_out(csv);
    SweepRow row{{cfg.protocol, cfg.mobility.model, cfg.traffic.kind, cfg.effective_mobility().mean_speed, cfg.seed},
                 report,
                 {}};
    write_csv_header(out);
    write_csv_row(out, row);
  }
  std::cout << report_json(report).dump(2) << '\n';
  return kOk;
}

int cmd_sweep(const std::string& config_path, const std::string& speeds, const std::string& protocols,
              const std::string& mobilities, const std::string& traffics, std::size_t seeds, const std::string& csv,
              unsigned jobs) {
  ScenarioConfig base = load_config(config_path);
  SweepGrid grid;
  grid.speeds.clear();
  for (const auto& s : split_list(speeds)) {
    try {
      grid.speeds.push_back(std::stod(s));
    } catch (const std::exception&) {
      throw ConfigError("bad speed '" + s + "'");
    }
  }
  grid.protocols.clear();
  for (const auto& s : split_list(protocols)) grid.protocols.push_back(routing::parse_protocol(s));
  grid.mobilities.clear();
  for (const auto& s : split_list(mobilities)) grid.mobilities.push_back(parse_mobility(s));
  grid.traffics.clear();
  for (const auto& s : split_list(traffics)) grid.traffics.push_back(parse_traffic(s));
  grid.seeds = seeds;
  grid.validate();
  for (const auto& cell : expand(grid, base.seed)) cell_config(base, cell).validate();

  auto out = open_out(csv);
  SweepOptions opts;
  opts.jobs = jobs;
  opts.progress = [](const SweepRow& row, std::size_t done, std::size_t total) {
    if (!row.error.empty())
      std::cerr << "cell " << routing::to_string(row.cell.protocol) << '/' << to_string(row.cell.mobility) << '/'
                << to_string(row.cell.traffic) << '/' << row.cell.speed << '/' << row.cell.seed
                << " failed: " << row.error << '\n';
    if (done % 50 == 0 || done == total) std::cerr << done << '/' << total << " cells\n";
  };
  const auto rows = run_sweep(base, grid, opts);
  write_csv(out, rows);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.report ? 0 : 1;
  if (failed > 0) {
    std::cerr << failed << " of " << rows.size() << " cells failed\n";
    return kFailure;
  }
  return kOk;
}

int cmd_gen_mobility(const std::string& config_path, const std::string& out_path) {
  ScenarioConfig cfg = load_config(config_path);
  cfg.validate();
  std::vector<mobility::MobilityTrace> traces;
  if (!cfg.static_positions.empty()) {
    for (NodeId i = 0; i < cfg.node_count; ++i)
      traces.push_back({i, cfg.duration, {{0.0, cfg.static_positions[i], 0.0}}});
  } else {
    auto rng = sim::derive_stream(cfg.seed, "mobility");
    traces = mobility::generate(cfg.effective_mobility(), cfg.node_count, cfg.duration, rng);
  }
  auto out = open_out(out_path);
  mobility::export_trace(out, traces, cfg.duration);
  if (!out) throw RuntimeFailure("failed writing '" + out_path + "'");
  return kOk;
}

int cmd_validate_traffic(const std::string& kind, std::size_t samples, std::uint64_t seed) {
  traffic::TrafficConfig cfg;
  cfg.kind = parse_traffic(kind);
  if (cfg.kind == traffic::Kind::Cbr) throw ConfigError("validate-traffic needs an ON/OFF kind (exp or pareto)");
  if (samples < 10) throw ConfigError("need at least 10 samples");
  cfg.validate();
  auto rng = sim::derive_stream(seed, "traffic");
  const auto d = traffic::diagnose(cfg, samples, rng);
  std::printf("kind %s\n", std::string(to_string(cfg.kind)).c_str());
  std::printf("samples %zu\n", samples);
  std::printf("on_mean_s %.9g\n", d.on_mean);
  std::printf("off_mean_s %.9g\n", d.off_mean);
  std::printf("on_fraction %.9g\n", d.on_fraction);
  std::printf("min_on_s %.9g\n", d.min_on);
  std::printf("tail_index %.9g\n", d.tail_index);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MANET control-packet energy simulator"};
  app.require_subcommand(1);

  std::string config_path, event_log, protocol_log, csv, out_path, kind;
  std::optional<std::uint64_t> seed;
  std::uint64_t traffic_seed = 1;
  std::string speeds = "2,5,10,15,20,25", protocols = "aodv,dsr,dsdv", mobilities = "rwp,rpgm,manhattan",
              traffics = "cbr,exp,pareto";
  std::size_t seeds = 5, samples = 100000;
  unsigned jobs = 1;

  auto* run = app.add_subcommand("run", "Run one scenario and print its JSON report");
  run->add_option("--config", config_path, "Scenario config file")->required();
  run->add_option("--seed", seed, "Master seed (overrides the config)");
  run->add_option("--event-log", event_log, "Write one line per delivered event");
  run->add_option("--protocol-log", protocol_log, "Write one line per control packet");
  run->add_option("--csv", csv, "Write the result as a one-row CSV");

  auto* sweep = app.add_subcommand("sweep", "Run a protocol x mobility x traffic x speed x seed grid");
  sweep->add_option("--config", config_path, "Base scenario config file")->required();
  sweep->add_option("--speeds", speeds, "Comma-separated speeds in m/s");
  sweep->add_option("--protocols", protocols, "Comma-separated protocols");
  sweep->add_option("--mobility", mobilities, "Comma-separated mobility models");
  sweep->add_option("--traffic", traffics, "Comma-separated traffic models");
  sweep->add_option("--seeds", seeds, "Seeds per cell");
  sweep->add_option("--csv", csv, "Output CSV")->required();
  sweep->add_option("--jobs", jobs, "Worker threads");

  auto* gen = app.add_subcommand("gen-mobility", "Generate a mobility trace file");
  gen->add_option("--config", config_path, "Scenario config file")->required();
  gen->add_option("--out", out_path, "Trace file")->required();

  auto* vt = app.add_subcommand("validate-traffic", "Print ON/OFF distribution diagnostics");
  vt->add_option("--kind", kind, "exp or pareto")->required();
  vt->add_option("--samples", samples, "ON/OFF cycles to draw");
  vt->add_option("--seed", traffic_seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*run) return cmd_run(config_path, seed, event_log, protocol_log, csv);
    if (*sweep) return cmd_sweep(config_path, speeds, protocols, mobilities, traffics, seeds, csv, jobs);
    if (*gen) return cmd_gen_mobility(config_path, out_path);
    if (*vt) return cmd_validate_traffic(kind, samples, traffic_seed);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kFailure;
  }
  return kInvalid;
}
