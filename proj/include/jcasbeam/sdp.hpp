#pragma once

#include <string>
#include <vector>

#include "jcasbeam/types.hpp"

namespace jcasbeam {

enum class SdpSense { Minimize, Maximize };
enum class SdpRelation { LessEqual, GreaterEqual };

struct SdpConstraint {
  RMat matrix;  // symmetric
  SdpRelation relation = SdpRelation::LessEqual;
  double bound = 0.0;
};

// Dense trace-normalized SDP:
//   optimize  trace(C W)
//   such that trace(W) = 1, W PSD, trace(A_k W) {<=,>=} bound_k.
struct SdpProblem {
  int dimension = 0;
  RMat objective;  // symmetric
  SdpSense sense = SdpSense::Maximize;
  std::vector<SdpConstraint> constraints;

  // Plain-text dump: "sdp <n> <sense> <k>" header line, then the objective
  // and each "<LE|GE> <bound>" constraint as n row-major lines of n values.
  std::string to_text() const;
  static SdpProblem from_text(const std::string& text);
};

enum class SdpStatus { Optimal, Infeasible, NumericalFailure };

struct SdpSolution {
  RMat W;
  double objective_value = 0.0;
  SdpStatus status = SdpStatus::NumericalFailure;
  double duality_gap = 0.0;
  int iterations = 0;
  std::string certificate;  // populated on infeasibility / failure
};

/// Primal-dual interior-point solve (homogeneous self-dual embedding with
/// Nesterov-Todd scaling). Deterministic for fixed inputs.
SdpSolution solve_sdp(const SdpProblem& problem, double tol = 1e-8);

}  // namespace jcasbeam
