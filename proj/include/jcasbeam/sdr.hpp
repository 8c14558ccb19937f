#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "jcasbeam/array.hpp"
#include "jcasbeam/desired_pattern.hpp"
#include "jcasbeam/sdp.hpp"
#include "jcasbeam/types.hpp"

namespace jcasbeam {

/// Real 2p x 2q block embedding [[Re, -Im], [Im, Re]] of a complex matrix.
RMat embed_complex_matrix(const CMat& a);

/// Real 2M stack [Re; Im] of a complex vector (an isometry).
RVec embed_complex_vector(const CVec& v);

/// Inverse of the vector embedding, scaled to unit Euclidean norm.
CVec real_to_complex_unit(const RVec& stacked);

/// Homogeneous waveform-mismatch quadratic: w~' A^ w~ equals the weighted
/// pattern MSE of w at the mismatch-minimizing scale. Symmetric; PSD for
/// accuracy weights bounded by one.
RMat build_waveform_quadratic(const DesiredPattern& desired, int num_elements);

/// Rank-<=2 PSD quadratic for the gain toward one direction.
RMat build_gain_quadratic(double theta, int num_elements);

/// Embedded angular power matrix (symmetric since the source is Hermitian).
RMat build_power_quadratic(const AngularPowerMatrix& apm);

/// Received-power quadratic H~' H~.
RMat build_rx_quadratic(const CMat& channel);

enum class GlobalKind { P5RxPower, P6WaveformFit, P7ScanGain, P8ScanPower };

// Inputs shared by the global designs. Bounds apply to unit-norm weights
// (equivalently unit-trace lifted matrices). Optional bounds switch the
// matching constraint off when absent.
struct GlobalInputs {
  CMat channel;
  DesiredPattern desired;
  int num_elements = 0;

  std::optional<double> waveform_bound;            // mismatch <= bound
  std::vector<double> gain_directions;             // radians
  std::vector<double> gain_bounds;                 // gain >= bound, per direction
  std::optional<AngularPowerMatrix> scan_range;    // integrated power source
  std::optional<double> scan_power_bound;          // integrated power >= bound
  std::optional<double> rx_power_bound;            // received power >= bound
  double scan_direction = 0.0;                     // objective direction for P7
};

/// Assembles the semidefinite relaxation for one design kind.
SdpProblem build_sdp(GlobalKind kind, const GlobalInputs& inputs);

struct Rank1Extraction {
  RVec vector;        // sqrt(lambda_1) q_1
  double rank_ratio;  // lambda_2 / lambda_1
  bool ambiguous;     // top eigenvalue not isolated
};

Rank1Extraction extract_rank1(const RMat& w);

enum class GlobalStatus { Optimal, Infeasible, NumericalFailure };

struct GlobalSolution {
  CVec w_t;                    // unit norm
  double objective_value = 0;  // final SDP objective (original sense)
  double rx_power = 0;         // ||H w_t||^2 of the returned weights
  double rank_ratio = 0;          // of the lifted solution actually used
  int iterations_used = 0;
  int converged_at = -1;       // first iteration with small objective change
  std::vector<double> constraint_slack;
  std::vector<double> rank_ratio_trace;
  std::vector<double> waveform_objective_trace;
  GlobalStatus status = GlobalStatus::Optimal;
  int failed_iteration = -1;
};

struct SdpIlsOptions {
  int max_outer_iters = 5;
  double objective_stop = 1e-6;   // stop when the waveform objective stalls
  bool stop_early = true;
  double rank1_threshold = 1e-6;  // above this, try vertex repair and randomization
  int randomization_samples = 500;
  double sdp_tol = 1e-9;
  std::uint64_t randomization_seed = 0x5eedbeef;
};

/// Alternating SDP solve and desired-phase update (the global designs'
/// outer loop). Phases start from all-ones.
GlobalSolution sdp_ils(GlobalKind kind, const GlobalInputs& inputs,
                       const SdpIlsOptions& options = {});

}  // namespace jcasbeam
