#pragma once

#include <string>
#include <vector>

#include "jcasbeam/config.hpp"

namespace jcasbeam {

inline constexpr const char* kVersion = "0.1.0";

struct OraclePropertyResult {
  std::string name;
  bool passed = false;
  double max_gap = 0.0;
  std::string detail;
};

struct OracleReport {
  std::vector<OraclePropertyResult> properties;
  bool all_passed() const;
  std::string to_text() const;
};

struct RunResult {
  std::string csv;
  std::string svg;    // empty unless requested
  int failures = 0;   // infeasible or numerically failed method evaluations
};

// Seeded Monte Carlo experiment orchestration. All runs are deterministic in
// (config, seed) and independent of the parallelism degree: trials draw from
// per-index random streams and are reduced in index order.
class ExperimentRunner {
 public:
  explicit ExperimentRunner(ExperimentConfig cfg);

  /// Per-angle gain of every configured method on one seeded channel.
  RunResult run_pattern(bool with_svg = false) const;

  /// Metric means while sweeping one constraint bound ("cs" or "cp").
  RunResult run_sweep(const std::string& parameter, double from, double to, int steps,
                      bool with_svg = false) const;

  /// Metric means per configured scanning direction.
  RunResult run_directions(bool with_svg = false) const;

  /// Metric means for varying channel path counts.
  RunResult run_paths(const std::vector<int>& path_counts, bool with_svg = false) const;

  /// Independent-oracle property suite at desk scale. `corrupt_solver`
  /// deliberately perturbs solver outputs to prove the suite can fail.
  OracleReport run_oracle_suite(int seeds = 50, bool corrupt_solver = false) const;

  const ExperimentConfig& config() const { return cfg_; }

 private:
  ExperimentConfig cfg_;
};

}  // namespace jcasbeam
