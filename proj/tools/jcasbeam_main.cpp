#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "jcasbeam/config.hpp"
#include "jcasbeam/experiment.hpp"

namespace fs = std::filesystem;
using jcasbeam::ExperimentConfig;
using jcasbeam::ExperimentRunner;
using jcasbeam::RunResult;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitOracleFailure = 3;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  bool svg = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file (defaults are built in)");
  cmd->add_option("--seed", opts.seed, "random seed override");
  cmd->add_option("--trials", opts.trials, "Monte Carlo trial count override");
  cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--threads", opts.threads, "worker thread count (0 = hardware)");
  cmd->add_flag("--svg", opts.svg, "also write an SVG plot");
}

ExperimentConfig load_config(const CommonOptions& opts) {
  ExperimentConfig cfg = opts.config_path.empty()
                             ? ExperimentConfig{}
                             : ExperimentConfig::from_file(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.trials) cfg.trials = *opts.trials;
  if (opts.threads) cfg.threads = *opts.threads;
  cfg.validate();
  return cfg;
}

int write_outputs(const RunResult& result, const CommonOptions& opts, const std::string& stem) {
  fs::create_directories(opts.out_dir);
  const fs::path csv_path = fs::path(opts.out_dir) / (stem + ".csv");
  std::ofstream(csv_path, std::ios::binary) << result.csv;
  std::cout << csv_path.string() << "\n";
  if (opts.svg && !result.svg.empty()) {
    const fs::path svg_path = fs::path(opts.out_dir) / (stem + ".svg");
    std::ofstream(svg_path, std::ios::binary) << result.svg;
    std::cout << svg_path.string() << "\n";
  }
  if (result.failures > 0) {
    std::cerr << "warning: " << result.failures
              << " method evaluations were infeasible or failed numerically\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multibeam design experiments for joint communication and sensing"};
  app.require_subcommand(1);

  CommonOptions pattern_opts;
  auto* pattern_cmd = app.add_subcommand(
      "pattern", "per-angle beam gains of every configured method on one seeded channel; "
                 "CSV columns: method,angle_deg,gain_db");
  add_common(pattern_cmd, pattern_opts);
  std::optional<double> pattern_direction;
  pattern_cmd->add_option("--direction", pattern_direction, "scanning direction in degrees");

  CommonOptions sweep_opts;
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "metric means while sweeping a constraint bound; "
               "CSV columns: sweep_value,method,mean_normalized_rx_power,mean_waveform_mse");
  add_common(sweep_cmd, sweep_opts);
  std::string sweep_param = "cs";
  double sweep_from = 0.0, sweep_to = 0.95;
  int sweep_steps = 8;
  sweep_cmd->add_option("--param", sweep_param, "swept bound: cs or cp")
      ->check(CLI::IsMember({"cs", "cp"}))
      ->capture_default_str();
  sweep_cmd->add_option("--from", sweep_from, "sweep start")->capture_default_str();
  sweep_cmd->add_option("--to", sweep_to, "sweep end")->capture_default_str();
  sweep_cmd->add_option("--steps", sweep_steps, "number of sweep values")->capture_default_str();

  CommonOptions dir_opts;
  auto* dir_cmd = app.add_subcommand(
      "directions", "metric means per configured scanning direction; "
                    "CSV columns: direction_deg,method,mean_normalized_rx_power,mean_waveform_mse");
  add_common(dir_cmd, dir_opts);

  CommonOptions paths_opts;
  auto* paths_cmd = app.add_subcommand(
      "paths", "metric means for varying channel path counts; "
               "CSV columns: num_paths,method,mean_normalized_rx_power,mean_waveform_mse");
  add_common(paths_cmd, paths_opts);
  std::vector<int> path_counts{1, 2, 4, 8, 16};
  paths_cmd->add_option("--path-counts", path_counts, "path counts to simulate")
      ->capture_default_str();

  CommonOptions oracle_opts;
  auto* oracle_cmd = app.add_subcommand(
      "oracle", "independent-oracle property suite; prints one PASS/FAIL line per property");
  add_common(oracle_cmd, oracle_opts);
  int oracle_seeds = 50;
  bool oracle_corrupt = false;
  oracle_cmd->add_option("--seeds", oracle_seeds, "number of random instances")
      ->capture_default_str();
  oracle_cmd->add_flag("--self-test-corrupt", oracle_corrupt,
                       "deliberately corrupt solver outputs (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (pattern_cmd->parsed()) {
      ExperimentConfig cfg = load_config(pattern_opts);
      if (pattern_direction) cfg.pattern_direction_deg = *pattern_direction;
      ExperimentRunner runner(cfg);
      return write_outputs(runner.run_pattern(pattern_opts.svg), pattern_opts, "pattern");
    }
    if (sweep_cmd->parsed()) {
      ExperimentRunner runner(load_config(sweep_opts));
      return write_outputs(
          runner.run_sweep(sweep_param, sweep_from, sweep_to, sweep_steps, sweep_opts.svg),
          sweep_opts, "sweep");
    }
    if (dir_cmd->parsed()) {
      ExperimentRunner runner(load_config(dir_opts));
      return write_outputs(runner.run_directions(dir_opts.svg), dir_opts, "directions");
    }
    if (paths_cmd->parsed()) {
      ExperimentRunner runner(load_config(paths_opts));
      return write_outputs(runner.run_paths(path_counts, paths_opts.svg), paths_opts, "paths");
    }
    if (oracle_cmd->parsed()) {
      ExperimentRunner runner(load_config(oracle_opts));
      const auto report = runner.run_oracle_suite(oracle_seeds, oracle_corrupt);
      std::cout << report.to_text();
      return report.all_passed() ? kExitOk : kExitOracleFailure;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  }
  return kExitUsage;
}
