#pragma once

#include <optional>
#include <span>
#include <vector>

#include "jcasbeam/desired_pattern.hpp"
#include "jcasbeam/types.hpp"

namespace jcasbeam {

// Pre-generated fixed (communication) and scanning (sensing) subbeam weight
// vectors, both unit norm, plus the power split rho in (0, 1).
struct SubbeamPair {
  CVec w_fixed;
  CVec w_scan;
  double rho = 0.5;

  /// P = sqrt(rho * (1 - rho)), the weight of the combination cross term.
  double cross_gain() const { return std::sqrt(rho * (1.0 - rho)); }
};

/// Zero-padded conventional beam: the first `active_elements` entries carry
/// the conjugate steering phases toward theta0, scaled to unit norm.
CVec conventional_beam(int active_elements, int num_elements, double theta0);

/// Shifts a beam pattern by `delta` in the sine-angle domain (norm-preserving).
CVec steer(const CVec& w, double delta);

/// w_t = sqrt(rho) w_fixed + sqrt(1-rho) e^{j phi} w_scan.
CVec combine(const SubbeamPair& pair, double phi);

/// Desired multibeam magnitudes from the ideal subbeams: per-angle RMS of the
/// rho-weighted subbeam powers; phases initialized to all-ones.
DesiredPattern desired_multibeam(const SubbeamPair& pair, std::span<const double> grid,
                                 std::optional<RVec> mainlobe_weights = std::nullopt);

struct IlsResult {
  CVec weights;                      // unit norm
  std::vector<double> objective;     // weighted mismatch after each iteration
};

/// Two-step iterative least squares: alternating minimum-norm weight solve
/// and phase update of the desired waveform. `num_elements` is the length of
/// the synthesized weight vector.
IlsResult ils_synthesize(const DesiredPattern& desired, int num_elements, int max_iters);

/// Uniform angle grid of `points` angles spanning [-pi/2, pi/2].
std::vector<double> default_angle_grid(int points = 181);

}  // namespace jcasbeam
