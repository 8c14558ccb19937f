#include "jcasbeam/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "jcasbeam/rng.hpp"

namespace jcasbeam {

GridSearchResult grid_search_phi(const std::function<double(double)>& objective,
                                 std::span<const std::function<double(double)>> constraints,
                                 int resolution) {
  if (resolution < 1000) throw std::invalid_argument("grid_search_phi: resolution too coarse");
  GridSearchResult res;
  const double step = 2.0 * kPi / resolution;
  for (int k = 0; k < resolution; ++k) {
    const double phi = -kPi + k * step;
    bool ok = true;
    for (const auto& c : constraints) {
      if (!(c(phi) >= 0.0)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    ++res.feasible_count;
    const double v = objective(phi);
    if (!res.found || v > res.value) {
      res.found = true;
      res.value = v;
      res.phi = phi;
    }
  }
  return res;
}

SampledSearchResult sampled_search_w(const std::function<double(const CVec&)>& objective,
                                     std::span<const std::function<double(const CVec&)>> constraints,
                                     int num_elements, int samples, std::uint64_t seed) {
  if (num_elements < 1) throw std::invalid_argument("sampled_search_w: need at least one element");
  if (samples < 1) throw std::invalid_argument("sampled_search_w: need at least one sample");
  Rng rng(seed);
  SampledSearchResult res;
  CVec w(num_elements);
  for (int s = 0; s < samples; ++s) {
    for (int m = 0; m < num_elements; ++m) w[m] = rng.circular_gaussian();
    const double n = w.norm();
    if (n == 0.0) continue;
    w /= n;
    bool ok = true;
    for (const auto& c : constraints) {
      if (!(c(w) >= 0.0)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    ++res.feasible_count;
    const double v = objective(w);
    if (!res.found || v > res.value) {
      res.found = true;
      res.value = v;
      res.w = w;
    }
  }
  return res;
}

CMat integration_reference(double theta_left, double theta_right, int num_elements) {
  constexpr int kSteps = 4096;
  const double delta = (theta_right - theta_left) / kSteps;
  CMat acc = CMat::Zero(num_elements, num_elements);
  for (int i = 1; i <= kSteps; ++i) {
    const double s = kPi * std::sin(theta_left + (i - 0.5) * delta);
    CVec a(num_elements);
    for (int m = 0; m < num_elements; ++m) a[m] = std::polar(1.0, s * m);
    acc.noalias() += delta * (a.conjugate() * a.transpose());
  }
  return acc;
}

}  // namespace jcasbeam
