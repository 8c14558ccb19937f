#include "jcasbeam/sdr.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "jcasbeam/rng.hpp"

namespace jcasbeam {

namespace {

CMat response_matrix(std::span<const double> grid, int num_elements) {
  CMat a(static_cast<Eigen::Index>(grid.size()), num_elements);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    a.row(static_cast<Eigen::Index>(i)) =
        steering_vector(grid[i], num_elements).transpose();
  }
  return a;
}

}  // namespace

RMat embed_complex_matrix(const CMat& a) {
  const Eigen::Index r = a.rows(), c = a.cols();
  RMat out(2 * r, 2 * c);
  out.topLeftCorner(r, c) = a.real();
  out.topRightCorner(r, c) = -a.imag();
  out.bottomLeftCorner(r, c) = a.imag();
  out.bottomRightCorner(r, c) = a.real();
  return out;
}

RVec embed_complex_vector(const CVec& v) {
  RVec out(2 * v.size());
  out.head(v.size()) = v.real();
  out.tail(v.size()) = v.imag();
  return out;
}

CVec real_to_complex_unit(const RVec& stacked) {
  if (stacked.size() % 2 != 0) throw std::invalid_argument("real_to_complex_unit: odd length");
  const Eigen::Index m = stacked.size() / 2;
  const double norm = stacked.norm();
  if (norm == 0.0) throw std::invalid_argument("real_to_complex_unit: zero vector");
  CVec w(m);
  for (Eigen::Index i = 0; i < m; ++i) w[i] = Complex(stacked[i], stacked[m + i]) / norm;
  return w;
}

RMat build_waveform_quadratic(const DesiredPattern& desired, int num_elements) {
  const CVec d_v = desired.desired_waveform();
  const double denom = d_v.squaredNorm();
  if (denom == 0.0) throw std::invalid_argument("build_waveform_quadratic: zero desired waveform");
  const CMat a = response_matrix(desired.grid, num_elements);
  const CMat weighted = desired.weights.cast<Complex>().asDiagonal() * a;
  const RMat f = embed_complex_matrix(weighted);
  const RVec s = embed_complex_vector(desired.weights.cast<Complex>().asDiagonal() * d_v);
  const RVec v = f.transpose() * s;
  RMat out = f.transpose() * f - v * v.transpose() / denom;
  return 0.5 * (out + out.transpose());
}

RMat build_gain_quadratic(double theta, int num_elements) {
  CMat row(1, num_elements);
  row.row(0) = steering_vector(theta, num_elements).transpose();
  const RMat e = embed_complex_matrix(row);
  return e.transpose() * e;
}

RMat build_power_quadratic(const AngularPowerMatrix& apm) {
  RMat out = embed_complex_matrix(apm.matrix);
  return 0.5 * (out + out.transpose());
}

RMat build_rx_quadratic(const CMat& channel) {
  const RMat e = embed_complex_matrix(channel);
  return e.transpose() * e;
}

SdpProblem build_sdp(GlobalKind kind, const GlobalInputs& inputs) {
  if (inputs.num_elements < 1) throw std::invalid_argument("build_sdp: element count missing");
  if (inputs.channel.cols() != inputs.num_elements) {
    throw std::invalid_argument("build_sdp: channel dimension mismatch");
  }
  if (inputs.gain_directions.size() != inputs.gain_bounds.size()) {
    throw std::invalid_argument("build_sdp: gain constraint lists must match");
  }
  SdpProblem p;
  p.dimension = 2 * inputs.num_elements;

  auto waveform = [&] { return build_waveform_quadratic(inputs.desired, inputs.num_elements); };
  auto scan_power = [&]() -> RMat {
    if (!inputs.scan_range) throw std::invalid_argument("build_sdp: scan range required");
    return build_power_quadratic(*inputs.scan_range);
  };

  auto add_waveform_constraint = [&](bool required) {
    if (inputs.waveform_bound) {
      p.constraints.push_back({waveform(), SdpRelation::LessEqual, *inputs.waveform_bound});
    } else if (required) {
      throw std::invalid_argument("build_sdp: waveform bound required for this kind");
    }
  };
  auto add_rx_constraint = [&](bool required) {
    if (inputs.rx_power_bound) {
      p.constraints.push_back(
          {build_rx_quadratic(inputs.channel), SdpRelation::GreaterEqual, *inputs.rx_power_bound});
    } else if (required) {
      throw std::invalid_argument("build_sdp: received-power bound required for this kind");
    }
  };
  auto add_gain_constraints = [&] {
    for (std::size_t i = 0; i < inputs.gain_directions.size(); ++i) {
      p.constraints.push_back({build_gain_quadratic(inputs.gain_directions[i], inputs.num_elements),
                               SdpRelation::GreaterEqual, inputs.gain_bounds[i]});
    }
  };
  auto add_scan_power_constraint = [&] {
    if (inputs.scan_power_bound) {
      p.constraints.push_back({scan_power(), SdpRelation::GreaterEqual, *inputs.scan_power_bound});
    }
  };

  switch (kind) {
    case GlobalKind::P5RxPower:
      p.sense = SdpSense::Maximize;
      p.objective = build_rx_quadratic(inputs.channel);
      add_waveform_constraint(false);
      add_gain_constraints();
      add_scan_power_constraint();
      break;
    case GlobalKind::P6WaveformFit:
      p.sense = SdpSense::Minimize;
      p.objective = waveform();
      add_rx_constraint(true);
      add_gain_constraints();
      add_scan_power_constraint();
      break;
    case GlobalKind::P7ScanGain:
      p.sense = SdpSense::Maximize;
      p.objective = build_gain_quadratic(inputs.scan_direction, inputs.num_elements);
      add_waveform_constraint(true);
      add_rx_constraint(true);
      add_gain_constraints();
      break;
    case GlobalKind::P8ScanPower:
      p.sense = SdpSense::Maximize;
      p.objective = scan_power();
      add_waveform_constraint(true);
      add_rx_constraint(true);
      add_gain_constraints();
      break;
  }
  return p;
}

Rank1Extraction extract_rank1(const RMat& w) {
  if (w.rows() != w.cols() || w.rows() == 0) {
    throw std::invalid_argument("extract_rank1: need a square matrix");
  }
  Eigen::SelfAdjointEigenSolver<RMat> eig(0.5 * (w + w.transpose()));
  const Eigen::Index n = w.rows();
  const double l1 = std::max(eig.eigenvalues()[n - 1], 0.0);
  const double l2 = n > 1 ? std::max(eig.eigenvalues()[n - 2], 0.0) : 0.0;
  if (l1 <= 0.0) throw std::invalid_argument("extract_rank1: matrix has no positive eigenvalue");
  Rank1Extraction out;
  out.vector = std::sqrt(l1) * eig.eigenvectors().col(n - 1);
  out.rank_ratio = l2 / l1;
  out.ambiguous = out.rank_ratio > 1.0 - 1e-6;
  return out;
}

GlobalSolution sdp_ils(GlobalKind kind, const GlobalInputs& inputs, const SdpIlsOptions& options) {
  if (options.max_outer_iters < 1) throw std::invalid_argument("sdp_ils: need at least one iteration");
  GlobalSolution out;
  GlobalInputs state = inputs;
  state.desired.phases = CVec::Ones(static_cast<Eigen::Index>(state.desired.grid.size()));
  const CMat response = response_matrix(state.desired.grid, state.num_elements);

  RVec w_unit;
  double prev_objective = std::numeric_limits<double>::quiet_NaN();
  double last_sdp_objective = 0.0;
  SdpProblem problem;

  for (int iter = 1; iter <= options.max_outer_iters; ++iter) {
    out.iterations_used = iter;
    problem = build_sdp(kind, state);
    const SdpSolution sol = solve_sdp(problem, options.sdp_tol);
    if (sol.status != SdpStatus::Optimal) {
      out.status = sol.status == SdpStatus::Infeasible ? GlobalStatus::Infeasible
                                                       : GlobalStatus::NumericalFailure;
      out.failed_iteration = iter;
      return out;
    }
    last_sdp_objective = sol.objective_value;

    const RMat waveform_quad = (kind == GlobalKind::P6WaveformFit)
                                   ? problem.objective
                                   : build_waveform_quadratic(state.desired, state.num_elements);
    Rank1Extraction ext = extract_rank1(sol.W);
    w_unit = ext.vector.normalized();
    double used_rank_ratio = ext.rank_ratio;
    if (ext.rank_ratio >= options.rank1_threshold) {
      // The embedding leaves the beamformer's global phase free; when no
      // phase-sensitive constraint binds, the optimal face is a phase circle
      // and the interior-point center is rank 2. Substitute the rank-1
      // vertex of that circle with the least waveform mismatch, provided it
      // verifiably attains the same objective and stays feasible.
      Eigen::SelfAdjointEigenSolver<RMat> top(sol.W);
      const Eigen::Index nn = sol.W.rows();
      const RVec q1 = top.eigenvectors().col(nn - 1);
      const RVec q2 = top.eigenvectors().col(nn - 2);
      const double obj_tol = 1e-6 * (1.0 + std::abs(sol.objective_value));
      Eigen::Matrix2d restricted;
      restricted << q1.dot(waveform_quad * q1), q1.dot(waveform_quad * q2),
          q2.dot(waveform_quad * q1), q2.dot(waveform_quad * q2);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> plane(0.5 *
                                                           (restricted + restricted.transpose()));
      auto acceptable = [&](const RVec& cand) {
        for (const auto& con : problem.constraints) {
          const double v = cand.dot(con.matrix * cand);
          const double slack =
              con.relation == SdpRelation::LessEqual ? con.bound - v : v - con.bound;
          if (slack < -1e-7 * (1.0 + std::abs(con.bound))) return false;
        }
        return std::abs(cand.dot(problem.objective * cand) - sol.objective_value) <= obj_tol;
      };
      const Eigen::Vector2d dir = plane.eigenvectors().col(0);  // least mismatch
      RVec vertex = (dir[0] * q1 + dir[1] * q2).normalized();
      // Canonical sign: first sizable coordinate positive, for determinism.
      for (Eigen::Index i = 0; i < vertex.size(); ++i) {
        if (std::abs(vertex[i]) > 1e-6) {
          if (vertex[i] < 0) vertex = -vertex;
          break;
        }
      }
      if (acceptable(vertex)) {
        w_unit = vertex;
        used_rank_ratio = 0.0;
      }
    }
    if (used_rank_ratio >= options.rank1_threshold) {
      // Gaussian randomization: draw candidates with covariance W, keep the
      // best one satisfying every constraint.
      Eigen::SelfAdjointEigenSolver<RMat> eig(sol.W);
      const RMat half =
          eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
      Rng rng(options.randomization_seed ^ (0x9e3779b97f4a7c15ULL * iter));
      const bool maximize = problem.sense == SdpSense::Maximize;
      double best = maximize ? -std::numeric_limits<double>::infinity()
                             : std::numeric_limits<double>::infinity();
      RVec g(sol.W.rows()), cand;
      bool found = false;
      for (int s = 0; s < options.randomization_samples; ++s) {
        for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = rng.gaussian();
        cand = (half * g).normalized();
        bool feasible = true;
        for (const auto& con : problem.constraints) {
          const double v = cand.dot(con.matrix * cand);
          const double slack =
              con.relation == SdpRelation::LessEqual ? con.bound - v : v - con.bound;
          if (slack < -1e-9) {
            feasible = false;
            break;
          }
        }
        if (!feasible) continue;
        const double v = cand.dot(problem.objective * cand);
        if (!found || (maximize ? v > best : v < best)) {
          found = true;
          best = v;
          w_unit = cand;
        }
      }
    }
    out.rank_ratio = used_rank_ratio;
    out.rank_ratio_trace.push_back(used_rank_ratio);

    const double waveform_objective = w_unit.dot(waveform_quad * w_unit);
    out.waveform_objective_trace.push_back(waveform_objective);
    const bool stalled = std::isfinite(prev_objective) &&
                         std::abs(waveform_objective - prev_objective) < options.objective_stop;
    if (stalled && out.converged_at < 0) out.converged_at = iter;
    prev_objective = waveform_objective;

    // Desired-phase refresh from the generated pattern. The global phase is
    // pinned at the strongest desired entry; the mismatch is invariant to it
    // and pinning makes the iteration's fixed point exact.
    const CVec w = real_to_complex_unit(w_unit);
    const CVec generated = response * w;
    for (Eigen::Index i = 0; i < generated.size(); ++i) {
      state.desired.phases[i] = std::polar(1.0, std::arg(generated[i]));
    }
    Eigen::Index anchor = 0;
    state.desired.magnitudes.maxCoeff(&anchor);
    const Complex pin = std::conj(state.desired.phases[anchor]);
    if (std::abs(pin) > 0.5) state.desired.phases *= pin;
    if (options.stop_early && stalled) break;
  }

  out.w_t = real_to_complex_unit(w_unit);
  out.objective_value = last_sdp_objective;
  out.rx_power = (inputs.channel * out.w_t).squaredNorm();
  out.constraint_slack.clear();
  for (const auto& con : problem.constraints) {
    const double v = w_unit.dot(con.matrix * w_unit);
    out.constraint_slack.push_back(con.relation == SdpRelation::LessEqual ? con.bound - v
                                                                          : v - con.bound);
  }
  out.status = GlobalStatus::Optimal;
  return out;
}

}  // namespace jcasbeam
