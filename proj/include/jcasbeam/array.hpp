#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jcasbeam/desired_pattern.hpp"
#include "jcasbeam/types.hpp"

namespace jcasbeam {

// Half-wavelength uniform linear array; the element count is the only
// geometric degree of freedom.
struct ArrayConfig {
  int num_elements = 16;  // >= 2
};

// One propagation path: complex amplitude, departure and arrival angles.
// Narrowband model: zero delay, zero Doppler.
struct PathSpec {
  Complex gain;
  double aod = 0.0;  // radians, strictly inside (-pi/2, pi/2)
  double aoa = 0.0;  // radians, strictly inside (-pi/2, pi/2)
};

struct MultipathChannel {
  std::vector<PathSpec> paths;
  int tx_elements = 0;
  int rx_elements = 0;
  CMat matrix;  // rx_elements x tx_elements
};

// Rician channel generator settings: one LOS path plus num_paths-1 NLOS
// paths with circularly Gaussian gains. The angular spread is the full
// width of the window centered on the LOS direction.
struct ChannelSimConfig {
  double los_aod = 0.0;
  double los_aoa = 0.0;
  int num_paths = 8;
  double los_nlos_ratio_db = 10.0;
  double angular_spread = deg2rad(14.0);
  int tx_elements = 16;
  int rx_elements = 16;
};

// Integrated outer-product matrix of steering vectors over an angle range,
// discretized with `steps` summation points. Hermitian, Toeplitz, PSD.
struct AngularPowerMatrix {
  double theta_left = 0.0;
  double theta_right = 0.0;
  int steps = 0;
  CMat matrix;  // M x M
};

/// Array response at angle theta: element m carries phase pi*m*sin(theta).
CVec steering_vector(double theta, int num_elements);

MultipathChannel build_channel(std::vector<PathSpec> paths, int tx_elements,
                               int rx_elements);

MultipathChannel sample_rician_channel(const ChannelSimConfig& cfg,
                                       std::uint64_t seed);

/// Conjugate matched receive combiner for transmit weights w_t.
CVec mrc_receive_weights(const CMat& channel, const CVec& w_t);

/// ||H w||^2 / ||w||^2.
double received_power(const CMat& channel, const CVec& w);

/// |a(theta)^T w|^2 / ||w||^2.
double bf_gain(double theta, const CVec& w);

AngularPowerMatrix angular_power_matrix(double theta_left, double theta_right,
                                        int steps, int num_elements);

/// Complex pattern a(theta_n)^T w over the grid.
CVec pattern(const CVec& w, std::span<const double> grid);

/// Weighted squared mismatch between the pattern of w and the desired
/// waveform, at the mismatch-minimizing real scale of the desired side.
double waveform_mse(const CVec& w, const DesiredPattern& desired);

/// Scale factor minimizing the weighted mismatch for fixed phases.
double optimal_pattern_scale(const CVec& generated, const DesiredPattern& desired);

}  // namespace jcasbeam
