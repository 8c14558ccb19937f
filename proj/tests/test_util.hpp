#pragma once

#include "jcasbeam/array.hpp"
#include "jcasbeam/rng.hpp"
#include "jcasbeam/subbeam.hpp"
#include "jcasbeam/types.hpp"

namespace jcasbeam::testutil {

inline CVec random_complex_vector(Rng& rng, int n) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.circular_gaussian();
  return v;
}

inline CVec random_unit_vector(Rng& rng, int n) {
  CVec v = random_complex_vector(rng, n);
  return v / v.norm();
}

inline CMat random_complex_matrix(Rng& rng, int rows, int cols) {
  CMat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng.circular_gaussian();
  }
  return m;
}

inline SubbeamPair random_pair(Rng& rng, int n, double rho = 0.5) {
  return SubbeamPair{random_unit_vector(rng, n), random_unit_vector(rng, n), rho};
}

/// Paper-style setup: fixed full-array beam at the LOS direction, zero-padded
/// scanning beam steered to `scan_direction`.
inline SubbeamPair conventional_pair(int num_elements, int scan_elements, double los_direction,
                                     double scan_direction, double rho = 0.5) {
  return SubbeamPair{
      conventional_beam(num_elements, num_elements, los_direction),
      steer(conventional_beam(scan_elements, num_elements, 0.0), scan_direction), rho};
}

}  // namespace jcasbeam::testutil
