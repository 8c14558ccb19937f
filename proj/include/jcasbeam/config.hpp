#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace jcasbeam {

// Simulation-study settings. Angles are degrees here (converted to radians
// at the point of use); defaults reproduce the reference measurement setup.
struct ExperimentConfig {
  // array
  int elements = 16;
  int fixed_beam_elements = 16;
  int scan_beam_elements = 12;

  // channel
  int paths = 8;
  double los_nlos_ratio_db = 10.0;
  double angular_spread_deg = 14.0;
  double los_direction_deg = 0.0;

  // subbeam combining
  double rho = 0.5;
  std::vector<std::string> combiner_methods = {"m1-ref", "unconstrained", "p1",
                                               "p2",     "p3",            "p4"};
  double gain_ratio = 0.9;        // C_s
  double scan_power_ratio = 0.9;  // C_sp
  double rx_power_ratio = 0.725;  // C_p

  // global designs
  std::vector<std::string> global_methods = {"p5"};
  int global_iterations = 5;   // outer SDP-ILS iterations
  double bounds_scale = 0.68;  // waveform budget relative to the ILS reference

  // scanning directions for the per-direction study
  std::vector<double> scan_directions_deg = {-24.36, -18.21, -12.27, -6.45,
                                             5.02,   10.81,  16.71,  22.80};
  double sweep_direction_deg = -6.45;
  double paths_direction_deg = -18.21;
  double pattern_direction_deg = 5.01;

  // angular power integration
  int integration_steps = 16;
  double integration_range_deg = 8.59;

  // synthesis
  int grid_points = 181;
  int ils_iterations = 50;

  // run control
  int trials = 200;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency

  void validate() const;

  /// Canonical JSON round-trip (unknown keys rejected).
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  std::string to_json_text() const;

  /// FNV-1a hash of the canonical JSON dump, for reproducibility stamps.
  std::uint64_t hash() const;
};

}  // namespace jcasbeam
