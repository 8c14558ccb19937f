#pragma once

#include <span>
#include <vector>

#include "jcasbeam/array.hpp"
#include "jcasbeam/interval.hpp"
#include "jcasbeam/subbeam.hpp"
#include "jcasbeam/types.hpp"

namespace jcasbeam {

// Magnitude/phase decompositions of the cross products that drive every
// combining-phase formula. Phases live in (-pi, pi].
struct CrossTerms {
  double b1 = 0, beta1 = 0;      // w_fixed^H w_scan
  double b2 = 0, beta2 = 0;      // w_fixed^H a*(theta)
  double b3 = 0, beta3 = 0;      // a(theta)^T w_scan
  double bp = 0, beta_p = 0;     // w_fixed^H Apm w_scan
  double bg = 0, beta_g = 0;     // w_fixed^H H^H H w_scan
};

enum class SolveStatus { InteriorOptimum, BoundaryOptimum, Relaxed, Infeasible };

struct CombinerSolution {
  double phi = 0.0;
  double objective_value = 0.0;
  CyclicIntervalSet feasible_set;
  SolveStatus status = SolveStatus::InteriorOptimum;
  bool degenerate_objective = false;  // objective constant in phi
  std::vector<double> applied_bounds; // effective thresholds after relaxation
  int relaxation_rounds = 0;
};

struct PhiOptimum {
  double phi = 0.0;
  bool degenerate = false;  // objective constant in phi
};

struct RelaxOptions {
  bool enabled = true;
  double decay = 0.95;
  int max_rounds = 50;
  std::vector<int> prioritized;  // indices never reduced
};

struct RelaxResult {
  CyclicIntervalSet feasible_set;
  std::vector<double> bounds;  // effective thresholds
  int rounds = 0;
  bool exhausted = false;
};

/// Received signal power ||H w_t(phi)||^2 / ||w_t(phi)||^2.
double combined_rx_power(const SubbeamPair& pair, const CMat& channel, double phi);

/// Normalized gain of the combined beam toward theta.
double combined_gain(const SubbeamPair& pair, double theta, double phi);

/// Normalized integrated power of the combined beam over the matrix range.
double combined_scan_power(const SubbeamPair& pair, const AngularPowerMatrix& apm, double phi);

/// Maximizer of the received power over the combining phase (no constraints).
PhiOptimum unconstrained_phi_opt(const SubbeamPair& pair, const CMat& channel);

/// Phases whose combined beam keeps gain >= ratio^2 (1-rho) M at each direction.
CyclicIntervalSet feasible_set_gain(const SubbeamPair& pair, std::span<const double> thetas,
                                    std::span<const double> gain_ratios);

/// Threshold-decay fallback for an empty gain-constraint intersection.
RelaxResult relax_gain_constraints(const SubbeamPair& pair, std::span<const double> thetas,
                                   std::span<const double> gain_ratios,
                                   const RelaxOptions& options = {});

/// Received-power maximization under minimum-gain constraints.
CombinerSolution solve_p1(const SubbeamPair& pair, const CMat& channel,
                          std::span<const double> thetas, std::span<const double> gain_ratios,
                          const RelaxOptions& relax = {});

/// Phases keeping integrated scan power >= power_ratio * (w_ref^H Apm w_ref).
CyclicIntervalSet feasible_set_power(const SubbeamPair& pair, const AngularPowerMatrix& apm,
                                     double power_ratio, const CVec& w_ref);

/// Received-power maximization under the integrated-scan-power constraint.
CombinerSolution solve_p2(const SubbeamPair& pair, const CMat& channel,
                          const AngularPowerMatrix& apm, double power_ratio, const CVec& w_ref,
                          const RelaxOptions& relax = {});

/// Maximizer of the normalized gain toward theta_scan over the phase.
PhiOptimum phi_smax_gain(const SubbeamPair& pair, double theta_scan);

/// Maximizer of the normalized integrated scan power over the phase.
PhiOptimum phi_smax_power(const SubbeamPair& pair, const AngularPowerMatrix& apm);

/// Received power of the fixed subbeam alone at its power share.
double communication_reference_power(const SubbeamPair& pair, const CMat& channel);

/// Phases keeping received power >= rx_ratio * communication_reference_power.
CyclicIntervalSet feasible_set_rxpower(const SubbeamPair& pair, const CMat& channel,
                                       double rx_ratio);

/// Scan-gain maximization under the received-power constraint.
CombinerSolution solve_p3(const SubbeamPair& pair, const CMat& channel, double theta_scan,
                          double rx_ratio);

/// Integrated-scan-power maximization under the received-power constraint.
CombinerSolution solve_p4(const SubbeamPair& pair, const CMat& channel,
                          const AngularPowerMatrix& apm, double rx_ratio);

/// Cross products for one sensing direction (diagnostic surface).
CrossTerms cross_terms(const SubbeamPair& pair, const CMat& channel, double theta,
                       const AngularPowerMatrix* apm = nullptr);

}  // namespace jcasbeam
