// Command-line front end: simulate (run a scenario, write report and
// optional snapshot), replay (verify a scenario reproduces an expected
// state hash), metrics (TVL series analytics from CSV).
//
// Exit codes: 0 success, 1 parse/config/input error, 2 replay mismatch.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cdpsim/config.hpp"
#include "cdpsim/metrics.hpp"
#include "cdpsim/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

int run_simulate(const std::string& scenario_path, const std::string& config_path,
                 uint64_t seed, const std::string& report_path,
                 const std::string& snapshot_path) {
  cdpsim::SimConfig config = cdpsim::parse_config_text(read_file(config_path));
  auto events = cdpsim::parse_scenario(read_file(scenario_path), seed);
  cdpsim::RunResult result = cdpsim::run_scenario(events, config, seed);
  write_file(report_path, result.report.dump(2) + "\n");
  if (!snapshot_path.empty()) {
    write_file(snapshot_path, result.snapshot.dump(2) + "\n");
  }
  std::cout << result.state_hash << "\n";
  return 0;
}

int run_replay(const std::string& scenario_path, const std::string& config_path, uint64_t seed,
               const std::string& expected_hash) {
  cdpsim::SimConfig config = cdpsim::parse_config_text(read_file(config_path));
  cdpsim::RunResult result =
      cdpsim::run_scenario_text(read_file(scenario_path), config, seed);
  if (result.state_hash != expected_hash) {
    std::cerr << "replay mismatch: expected " << expected_hash << ", got " << result.state_hash
              << "\n";
    return 2;
  }
  std::cout << "replay ok: " << result.state_hash << "\n";
  return 0;
}

int run_metrics(const std::string& csv_path, const std::string& report_path) {
  auto series = cdpsim::parse_tvl_csv(read_file(csv_path));
  cdpsim::SeriesStats stats = cdpsim::series_stats(series);
  nlohmann::json report;
  report["points"] = series.size();
  report["peak"] = {{"date", stats.peak.date}, {"tvl_usd", cdpsim::to_string(stats.peak.tvl_usd)}};
  report["trough_after_peak"] = {{"date", stats.trough_after_peak.date},
                                 {"tvl_usd", cdpsim::to_string(stats.trough_after_peak.tvl_usd)}};
  report["max_drawdown"] = cdpsim::to_string(stats.max_drawdown);
  write_file(report_path, report.dump(2) + "\n");
  std::cout << "peak " << stats.peak.date << " trough " << stats.trough_after_peak.date
            << " max_drawdown " << cdpsim::to_string(stats.max_drawdown) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic CDP stablecoin protocol simulator"};
  app.require_subcommand(1);

  std::string scenario_path, config_path, report_path, snapshot_path, expected_hash, csv_path;
  uint64_t seed = 0;

  CLI::App* simulate = app.add_subcommand("simulate", "run a scenario and write a report");
  simulate->add_option("--scenario", scenario_path, "scenario JSONL file")->required();
  simulate->add_option("--config", config_path, "config JSON file")->required();
  simulate->add_option("--seed", seed, "seed for randomized price walks");
  simulate->add_option("--report", report_path, "output report path")->required();
  simulate->add_option("--snapshot", snapshot_path, "output snapshot path");

  CLI::App* replay = app.add_subcommand("replay", "verify a scenario reproduces a state hash");
  replay->add_option("--scenario", scenario_path, "scenario JSONL file")->required();
  replay->add_option("--config", config_path, "config JSON file")->required();
  replay->add_option("--seed", seed, "seed for randomized price walks");
  replay->add_option("--expect", expected_hash, "expected final state hash")->required();

  CLI::App* metrics = app.add_subcommand("metrics", "TVL series analytics from CSV");
  metrics->add_option("--tvl-csv", csv_path, "CSV with date,tvl_usd rows")->required();
  metrics->add_option("--report", report_path, "output report path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return run_simulate(scenario_path, config_path, seed, report_path, snapshot_path);
    }
    if (replay->parsed()) {
      return run_replay(scenario_path, config_path, seed, expected_hash);
    }
    return run_metrics(csv_path, report_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
