#pragma once

#include <vector>

#include "jcasbeam/types.hpp"

namespace jcasbeam {

// Desired beamforming waveform sampled on an angle grid: per-angle accuracy
// weights D (diagonal), desired magnitudes D_v (diagonal) and unit-modulus
// phases p_v, plus the current real scale factor c_s.
struct DesiredPattern {
  std::vector<double> grid;  // angles, radians
  RVec weights;              // accuracy weights, >= 0
  RVec magnitudes;           // desired magnitudes, >= 0
  CVec phases;               // unit-modulus
  double scale = 1.0;

  /// Complex desired waveform d_v = D_v .* p_v.
  CVec desired_waveform() const {
    return magnitudes.cast<Complex>().cwiseProduct(phases);
  }
};

}  // namespace jcasbeam
