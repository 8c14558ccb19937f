#include "jcasbeam/subbeam.hpp"

#include <cmath>
#include <stdexcept>

#include "jcasbeam/array.hpp"

namespace jcasbeam {

CVec conventional_beam(int active_elements, int num_elements, double theta0) {
  if (active_elements < 1 || active_elements > num_elements) {
    throw std::invalid_argument("conventional_beam: active element count out of range");
  }
  CVec w = CVec::Zero(num_elements);
  w.head(active_elements) =
      steering_vector(theta0, active_elements).conjugate() / std::sqrt(double(active_elements));
  return w;
}

CVec steer(const CVec& w, double delta) {
  const double step = kPi * std::sin(delta);
  CVec out(w.size());
  for (Eigen::Index m = 0; m < w.size(); ++m) {
    out[m] = w[m] * std::polar(1.0, -step * static_cast<double>(m));
  }
  return out;
}

CVec combine(const SubbeamPair& pair, double phi) {
  if (!(pair.rho > 0.0 && pair.rho < 1.0)) {
    throw std::invalid_argument("combine: rho must lie in (0, 1)");
  }
  if (pair.w_fixed.size() != pair.w_scan.size()) {
    throw std::invalid_argument("combine: subbeam length mismatch");
  }
  return std::sqrt(pair.rho) * pair.w_fixed +
         std::sqrt(1.0 - pair.rho) * std::polar(1.0, phi) * pair.w_scan;
}

DesiredPattern desired_multibeam(const SubbeamPair& pair, std::span<const double> grid,
                                 std::optional<RVec> mainlobe_weights) {
  if (grid.empty()) throw std::invalid_argument("desired_multibeam: empty angle grid");
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  DesiredPattern out;
  out.grid.assign(grid.begin(), grid.end());
  const CVec pat_fixed = pattern(pair.w_fixed, grid);
  const CVec pat_scan = pattern(pair.w_scan, grid);
  out.magnitudes.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.magnitudes[i] = std::sqrt(pair.rho * std::norm(pat_fixed[i]) +
                                  (1.0 - pair.rho) * std::norm(pat_scan[i]));
  }
  if (mainlobe_weights) {
    if (mainlobe_weights->size() != n) {
      throw std::invalid_argument("desired_multibeam: weight length mismatch");
    }
    out.weights = *mainlobe_weights;
  } else {
    out.weights = RVec::Ones(n);
  }
  out.phases = CVec::Ones(n);
  out.scale = 1.0;
  return out;
}

IlsResult ils_synthesize(const DesiredPattern& desired, int num_elements, int max_iters) {
  if (max_iters < 1) throw std::invalid_argument("ils_synthesize: need at least one iteration");
  if (num_elements < 1) throw std::invalid_argument("ils_synthesize: need at least one element");
  const Eigen::Index n = static_cast<Eigen::Index>(desired.grid.size());
  if (desired.magnitudes.size() != n || desired.phases.size() != n ||
      desired.weights.size() != n) {
    throw std::invalid_argument("ils_synthesize: desired pattern inconsistent");
  }

  CMat response(n, num_elements);
  for (Eigen::Index i = 0; i < n; ++i) {
    response.row(i) = steering_vector(desired.grid[i], num_elements).transpose();
  }
  const CVec dw = desired.weights.cast<Complex>();
  const CMat weighted = dw.asDiagonal() * response;
  // Minimum-norm least squares; tolerates rank-deficient weighted response.
  Eigen::CompleteOrthogonalDecomposition<CMat> solver(weighted);

  DesiredPattern state = desired;
  double scale = desired.scale;
  IlsResult result;
  result.objective.reserve(max_iters);
  CVec w = CVec::Zero(num_elements);
  for (int iter = 0; iter < max_iters; ++iter) {
    const CVec target = dw.cwiseProduct(scale * state.desired_waveform());
    w = solver.solve(target);
    const CVec generated = response * w;
    for (Eigen::Index i = 0; i < n; ++i) {
      state.phases[i] = std::polar(1.0, std::arg(generated[i]));
    }
    scale = optimal_pattern_scale(generated, state);
    const CVec resid = generated - scale * state.desired_waveform();
    result.objective.push_back(dw.cwiseProduct(resid).squaredNorm());
  }
  const double norm = w.norm();
  if (norm > 0.0) w /= norm;
  result.weights = std::move(w);
  return result;
}

std::vector<double> default_angle_grid(int points) {
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) {
    grid[i] = -kPi / 2 + kPi * static_cast<double>(i) / (points - 1);
  }
  return grid;
}

}  // namespace jcasbeam
