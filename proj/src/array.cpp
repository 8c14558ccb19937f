#include "jcasbeam/array.hpp"

#include <cmath>
#include <stdexcept>

#include "jcasbeam/rng.hpp"

namespace jcasbeam {

namespace {

void check_path_angles(const PathSpec& path) {
  if (!(path.aod > -kPi / 2 && path.aod < kPi / 2) ||
      !(path.aoa > -kPi / 2 && path.aoa < kPi / 2)) {
    throw std::invalid_argument("path angles must lie strictly inside (-pi/2, pi/2)");
  }
}

}  // namespace

CVec steering_vector(double theta, int num_elements) {
  if (num_elements < 1) throw std::invalid_argument("steering_vector: need at least one element");
  if (!(theta >= -kPi / 2 && theta <= kPi / 2)) {
    throw std::invalid_argument("steering_vector: angle outside [-pi/2, pi/2]");
  }
  CVec a(num_elements);
  const double step = kPi * std::sin(theta);
  for (int m = 0; m < num_elements; ++m) {
    a[m] = std::polar(1.0, step * m);
  }
  return a;
}

MultipathChannel build_channel(std::vector<PathSpec> paths, int tx_elements,
                               int rx_elements) {
  if (tx_elements < 1 || rx_elements < 1) {
    throw std::invalid_argument("build_channel: element counts must be positive");
  }
  CMat H = CMat::Zero(rx_elements, tx_elements);
  for (const PathSpec& path : paths) {
    check_path_angles(path);
    CVec ar = steering_vector(path.aoa, rx_elements);
    CVec at = steering_vector(path.aod, tx_elements);
    H.noalias() += path.gain * (ar * at.transpose());
  }
  return MultipathChannel{std::move(paths), tx_elements, rx_elements, std::move(H)};
}

MultipathChannel sample_rician_channel(const ChannelSimConfig& cfg, std::uint64_t seed) {
  if (cfg.num_paths < 1) throw std::invalid_argument("sample_rician_channel: need at least one path");
  const double half = cfg.angular_spread / 2.0;
  if (std::abs(cfg.los_aod) + half >= kPi / 2 || std::abs(cfg.los_aoa) + half >= kPi / 2) {
    throw std::invalid_argument("sample_rician_channel: angular window leaves (-pi/2, pi/2)");
  }
  Rng rng(seed);
  std::vector<PathSpec> paths;
  paths.reserve(cfg.num_paths);
  paths.push_back({Complex{1.0, 0.0}, cfg.los_aod, cfg.los_aoa});
  const int num_nlos = cfg.num_paths - 1;
  if (num_nlos > 0) {
    // Total expected NLOS power sits ratio_db below the unit LOS power,
    // split evenly across paths.
    const double total_nlos = std::pow(10.0, -cfg.los_nlos_ratio_db / 10.0);
    const double per_path_amp = std::sqrt(total_nlos / num_nlos);
    for (int l = 0; l < num_nlos; ++l) {
      double aod = cfg.los_aod + rng.uniform(-half, half);
      double aoa = cfg.los_aoa + rng.uniform(-half, half);
      paths.push_back({per_path_amp * rng.circular_gaussian(), aod, aoa});
    }
  }
  return build_channel(std::move(paths), cfg.tx_elements, cfg.rx_elements);
}

CVec mrc_receive_weights(const CMat& channel, const CVec& w_t) {
  if (channel.cols() != w_t.size()) {
    throw std::invalid_argument("mrc_receive_weights: dimension mismatch");
  }
  return (channel * w_t).conjugate();
}

double received_power(const CMat& channel, const CVec& w) {
  if (channel.cols() != w.size()) throw std::invalid_argument("received_power: dimension mismatch");
  const double n2 = w.squaredNorm();
  if (n2 == 0.0) throw std::invalid_argument("received_power: zero weight vector");
  return (channel * w).squaredNorm() / n2;
}

double bf_gain(double theta, const CVec& w) {
  const double n2 = w.squaredNorm();
  if (n2 == 0.0) throw std::invalid_argument("bf_gain: zero weight vector");
  const CVec a = steering_vector(theta, static_cast<int>(w.size()));
  return std::norm(a.cwiseProduct(w).sum()) / n2;
}

AngularPowerMatrix angular_power_matrix(double theta_left, double theta_right,
                                        int steps, int num_elements) {
  if (theta_right < theta_left) throw std::invalid_argument("angular_power_matrix: reversed range");
  if (steps < 1) throw std::invalid_argument("angular_power_matrix: need at least one step");
  if (num_elements < 1) throw std::invalid_argument("angular_power_matrix: need at least one element");

  // Entry (m, n) of a*(theta) a^T(theta) is exp(j*pi*(n-m)*sin(theta)), so
  // the sum is Toeplitz: only 2M-1 distinct scalar sums are needed. Sampling
  // at interval midpoints keeps every entry within 1e-3 of the converged
  // value already at 16 steps over beamwidth-sized ranges; one-sided
  // sampling would need hundreds of steps for that.
  const double delta = (theta_right - theta_left) / steps;
  std::vector<Complex> diag_sum(num_elements, Complex{0.0, 0.0});
  for (int i = 1; i <= steps; ++i) {
    const double s = kPi * std::sin(theta_left + (i - 0.5) * delta);
    for (int k = 0; k < num_elements; ++k) {
      diag_sum[k] += std::polar(delta, s * k);
    }
  }
  CMat out(num_elements, num_elements);
  for (int m = 0; m < num_elements; ++m) {
    for (int n = 0; n < num_elements; ++n) {
      const int k = n - m;
      out(m, n) = k >= 0 ? diag_sum[k] : std::conj(diag_sum[-k]);
    }
  }
  return AngularPowerMatrix{theta_left, theta_right, steps, std::move(out)};
}

CVec pattern(const CVec& w, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("pattern: empty angle grid");
  const int m = static_cast<int>(w.size());
  CVec out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t n = 0; n < grid.size(); ++n) {
    out[static_cast<Eigen::Index>(n)] = steering_vector(grid[n], m).cwiseProduct(w).sum();
  }
  return out;
}

double optimal_pattern_scale(const CVec& generated, const DesiredPattern& desired) {
  if (generated.size() != desired.magnitudes.size()) {
    throw std::invalid_argument("optimal_pattern_scale: dimension mismatch");
  }
  const CVec d_v = desired.desired_waveform();
  const double denom = d_v.squaredNorm();
  if (denom == 0.0) return 0.0;
  const CVec d2 = desired.weights.cwiseProduct(desired.weights).cast<Complex>();
  const Complex num = d_v.conjugate().cwiseProduct(d2).cwiseProduct(generated).sum();
  return num.real() / denom;
}

double waveform_mse(const CVec& w, const DesiredPattern& desired) {
  if (static_cast<std::size_t>(desired.magnitudes.size()) != desired.grid.size()) {
    throw std::invalid_argument("waveform_mse: desired pattern inconsistent");
  }
  const CVec g = pattern(w, desired.grid);
  const double c = optimal_pattern_scale(g, desired);
  const CVec resid = g - c * desired.desired_waveform();
  return desired.weights.cast<Complex>().cwiseProduct(resid).squaredNorm();
}

}  // namespace jcasbeam
