#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "jcasbeam/types.hpp"

namespace jcasbeam {

// Brute-force references. Constraint callables return a raw value; a grid
// point is feasible iff every value is >= 0, with no tolerance, so solver
// slack stays visible.

struct GridSearchResult {
  double phi = 0.0;
  double value = 0.0;
  std::int64_t feasible_count = 0;
  bool found = false;
};

/// Exhaustive search over `resolution` phases uniformly covering [-pi, pi).
/// Ties keep the lowest-index grid point.
GridSearchResult grid_search_phi(const std::function<double(double)>& objective,
                                 std::span<const std::function<double(double)>> constraints,
                                 int resolution = 200000);

struct SampledSearchResult {
  CVec w;
  double value = 0.0;
  std::int64_t feasible_count = 0;
  bool found = false;
};

/// Best of `samples` uniformly drawn unit-norm complex vectors.
SampledSearchResult sampled_search_w(const std::function<double(const CVec&)>& objective,
                                     std::span<const std::function<double(const CVec&)>> constraints,
                                     int num_elements, int samples, std::uint64_t seed);

/// Reference angular power matrix: the same summation at 4096 steps,
/// accumulated entry by entry without the Toeplitz shortcut.
CMat integration_reference(double theta_left, double theta_right, int num_elements);

}  // namespace jcasbeam
