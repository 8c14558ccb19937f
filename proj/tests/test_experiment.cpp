#include <doctest.h>

#include <sstream>

#include "jcasbeam/experiment.hpp"

using namespace jcasbeam;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.elements = 8;
  cfg.fixed_beam_elements = 8;
  cfg.scan_beam_elements = 6;
  cfg.trials = 4;
  cfg.grid_points = 61;
  cfg.ils_iterations = 20;
  cfg.scan_directions_deg = {-6.45, 10.81};
  cfg.global_methods = {"p5"};
  cfg.seed = 71;
  return cfg;
}

// Parses data rows into direction -> method -> (rx, mse).
struct ParsedRow {
  double key;
  std::string method;
  double rx;
  double mse;
};

std::vector<ParsedRow> parse_rows(const std::string& csv) {
  std::vector<ParsedRow> rows;
  std::istringstream is(csv);
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    ParsedRow row;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    row.key = std::stod(cell);
    std::getline(ls, row.method, ',');
    std::getline(ls, cell, ',');
    row.rx = std::stod(cell);
    std::getline(ls, cell, ',');
    row.mse = std::stod(cell);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("config round-trips through json and rejects bad input") {
  ExperimentConfig cfg = small_config();
  const std::string text = cfg.to_json_text();
  const ExperimentConfig back = ExperimentConfig::from_json_text(text);
  CHECK(back.elements == cfg.elements);
  CHECK(back.scan_directions_deg == cfg.scan_directions_deg);
  CHECK(back.hash() == cfg.hash());

  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{\"bogus\": 1}"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{\"trials\": 0}"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{\"combiner\": {\"methods\": [\"nope\"]}}"),
                  std::invalid_argument);

  ExperimentConfig threads_differ = cfg;
  threads_differ.threads = 7;
  CHECK(threads_differ.hash() == cfg.hash());  // parallelism excluded from the stamp
}

TEST_CASE("directions run is byte-identical across parallelism settings") {
  ExperimentConfig cfg = small_config();
  cfg.threads = 1;
  const auto serial = ExperimentRunner(cfg).run_directions();
  cfg.threads = 2;
  const auto parallel = ExperimentRunner(cfg).run_directions();
  CHECK(serial.failures == 0);
  CHECK(serial.csv == parallel.csv);

  const auto again = ExperimentRunner(cfg).run_directions();
  CHECK(again.csv == parallel.csv);
}

TEST_CASE("directions output carries the schema and reproducibility stamps") {
  ExperimentConfig cfg = small_config();
  cfg.trials = 2;
  cfg.global_methods = {};
  const auto result = ExperimentRunner(cfg).run_directions();
  std::istringstream is(result.csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == std::string("# jcasbeam ") + kVersion);
  std::getline(is, line);
  CHECK(line == "# subcommand=directions");
  std::getline(is, line);
  CHECK(line.find("# config_hash=0x") == 0);
  CHECK(line.find("seed=71") != std::string::npos);
  std::getline(is, line);
  CHECK(line == "direction_deg,method,mean_normalized_rx_power,mean_waveform_mse");

  const auto rows = parse_rows(result.csv);
  CHECK(rows.size() == 2 * cfg.combiner_methods.size());
  for (const auto& row : rows) {
    CHECK(row.rx > 0.0);
    CHECK(row.mse >= 0.0);
  }
}

TEST_CASE("vacuous constraint bounds collapse onto the unconstrained solution") {
  ExperimentConfig cfg = small_config();
  cfg.trials = 3;
  cfg.global_methods = {};
  cfg.gain_ratio = 0.0;
  cfg.scan_power_ratio = 0.0;
  cfg.rx_power_ratio = 0.0;
  const auto result = ExperimentRunner(cfg).run_directions();
  const auto rows = parse_rows(result.csv);
  // P1/P2 maximize the same objective as the unconstrained phase; with empty
  // constraints their metrics must match it exactly.
  for (double dir : cfg.scan_directions_deg) {
    double unconstrained_rx = -1.0;
    for (const auto& row : rows) {
      if (row.key == dir && row.method == "unconstrained") unconstrained_rx = row.rx;
    }
    REQUIRE(unconstrained_rx > 0.0);
    for (const auto& row : rows) {
      if (row.key != dir) continue;
      if (row.method == "p1" || row.method == "p2") {
        CHECK(row.rx == unconstrained_rx);
      }
    }
  }
}

TEST_CASE("sweep endpoint at zero matches the unconstrained metrics exactly") {
  ExperimentConfig cfg = small_config();
  cfg.trials = 3;
  const auto result = ExperimentRunner(cfg).run_sweep("cs", 0.0, 0.9, 3);
  const auto rows = parse_rows(result.csv);
  double p1_at_zero = -1.0, unconstrained = -2.0;
  double p1_mse_at_zero = -1.0, unconstrained_mse = -2.0;
  for (const auto& row : rows) {
    if (row.key == 0.0 && row.method == "p1") {
      p1_at_zero = row.rx;
      p1_mse_at_zero = row.mse;
    }
    if (row.key == 0.0 && row.method == "unconstrained") {
      unconstrained = row.rx;
      unconstrained_mse = row.mse;
    }
  }
  CHECK(p1_at_zero == unconstrained);
  CHECK(p1_mse_at_zero == unconstrained_mse);
}

TEST_CASE("sweep validates its arguments") {
  ExperimentRunner runner(small_config());
  CHECK_THROWS_AS(runner.run_sweep("bogus", 0.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(runner.run_sweep("cs", -0.1, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(runner.run_sweep("cs", 0.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(runner.run_paths({}), std::invalid_argument);
  CHECK_THROWS_AS(runner.run_paths({0}), std::invalid_argument);
  ExperimentConfig bad = small_config();
  bad.trials = 0;
  CHECK_THROWS_AS(ExperimentRunner(bad), std::invalid_argument);
}

TEST_CASE("pattern run covers the angle grid for every method") {
  ExperimentConfig cfg = small_config();
  cfg.global_methods = {"p5"};
  const auto result = ExperimentRunner(cfg).run_pattern(true);
  CHECK(result.failures == 0);
  CHECK(result.svg.find("<svg") == 0);
  std::istringstream is(result.csv);
  std::string line;
  int p5_rows = 0, m1_rows = 0;
  while (std::getline(is, line)) {
    if (line.rfind("p5,", 0) == 0) ++p5_rows;
    if (line.rfind("m1-ref,", 0) == 0) ++m1_rows;
  }
  CHECK(p5_rows == cfg.grid_points);
  CHECK(m1_rows == cfg.grid_points);
}

TEST_CASE("paths run emits one block per path count") {
  ExperimentConfig cfg = small_config();
  cfg.trials = 2;
  cfg.global_methods = {};
  const auto result = ExperimentRunner(cfg).run_paths({1, 4});
  const auto rows = parse_rows(result.csv);
  int l1 = 0, l4 = 0;
  for (const auto& row : rows) {
    if (row.key == 1.0) ++l1;
    if (row.key == 4.0) ++l4;
  }
  CHECK(l1 == static_cast<int>(cfg.combiner_methods.size()));
  CHECK(l4 == static_cast<int>(cfg.combiner_methods.size()));
}

TEST_CASE("oracle suite passes clean and detects corruption") {
  ExperimentConfig cfg = small_config();
  ExperimentRunner runner(cfg);
  const auto clean = runner.run_oracle_suite(6, false);
  for (const auto& p : clean.properties) {
    INFO(p.name, " gap=", p.max_gap);
    CHECK(p.passed);
  }
  CHECK(clean.all_passed());
  const std::string text = clean.to_text();
  CHECK(text.find("PASS") != std::string::npos);
  CHECK(text.find("max_gap=") != std::string::npos);

  const auto corrupted = runner.run_oracle_suite(6, true);
  CHECK_FALSE(corrupted.all_passed());
}
