#include "jcasbeam/combiner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace jcasbeam {

namespace {

void validate_pair(const SubbeamPair& pair) {
  if (!(pair.rho > 0.0 && pair.rho < 1.0)) {
    throw std::invalid_argument("subbeam pair: rho must lie in (0, 1)");
  }
  if (pair.w_fixed.size() != pair.w_scan.size() || pair.w_fixed.size() == 0) {
    throw std::invalid_argument("subbeam pair: weight length mismatch");
  }
  if (std::abs(pair.w_fixed.norm() - 1.0) > 1e-6 || std::abs(pair.w_scan.norm() - 1.0) > 1e-6) {
    throw std::invalid_argument("subbeam pair: weights must be unit norm");
  }
}

// Numerator data of a phase-dependent Rayleigh-type ratio
//   (G + 2 P Re{e^{j phi} t}) / (1 + 2 P Re{e^{j phi} u})
// for a Hermitian PSD quadratic form B: t = w_c^H B w_s and G is the
// rho-weighted sum of the two diagonal quadratic forms.
struct FormTerms {
  Complex t;
  double G = 0.0;
};

FormTerms rx_form(const SubbeamPair& pair, const CMat& channel) {
  const CVec hc = channel * pair.w_fixed;
  const CVec hs = channel * pair.w_scan;
  return {hc.dot(hs), pair.rho * hc.squaredNorm() + (1.0 - pair.rho) * hs.squaredNorm()};
}

FormTerms gain_form(const SubbeamPair& pair, double theta) {
  const CVec a = steering_vector(theta, static_cast<int>(pair.w_fixed.size()));
  const Complex vc = a.cwiseProduct(pair.w_fixed).sum();
  const Complex vs = a.cwiseProduct(pair.w_scan).sum();
  return {std::conj(vc) * vs, pair.rho * std::norm(vc) + (1.0 - pair.rho) * std::norm(vs)};
}

FormTerms power_form(const SubbeamPair& pair, const AngularPowerMatrix& apm) {
  const CVec ac = apm.matrix * pair.w_fixed;
  const CVec as = apm.matrix * pair.w_scan;
  const Complex t = pair.w_fixed.dot(as);
  const double g = pair.rho * std::real(pair.w_fixed.dot(ac)) +
                   (1.0 - pair.rho) * std::real(pair.w_scan.dot(as));
  return {t, g};
}

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// Maximizer of the ratio above over phi. The derivative numerator is
//   h(phi) = X1 sin(phi) + X2 cos(phi) + L
// with X1 + j X2 = 2P (G u - t) and L = -4 P^2 Im{t conj(u)}; the maximum
// sits where h crosses zero from above: phi = pi + asin(L/R) - atan2(X2, X1).
PhiOptimum maximize_ratio(double cross, Complex u, const FormTerms& form) {
  const Complex z = 2.0 * cross * (form.G * u - form.t);
  const double radius = std::abs(z);
  const double scale = 2.0 * cross * (form.G * std::abs(u) + std::abs(form.t));
  if (radius <= 1e-12 * std::max(scale, 1e-300)) {
    return {0.0, true};
  }
  const double level = -4.0 * cross * cross * std::imag(form.t * std::conj(u));
  const double mu = std::asin(clamp_unit(level / radius));
  const double zeta = std::atan2(z.imag(), z.real());
  return {wrap_angle(kPi + mu - zeta), false};
}

// Phases satisfying (G + 2P Re{e^{j phi} t}) / (1 + 2P Re{e^{j phi} u}) >= T.
// Reduces to c1 sin(phi) + c2 cos(phi) >= B2 - B1 and the three-way split on
// |B2 - B1| against the amplitude; ties within 1e-12 resolve to the arc case.
CyclicIntervalSet ratio_constraint_set(double cross, Complex u, const FormTerms& form,
                                       double threshold) {
  const double b1 = form.G / (2.0 * cross);
  const double b2 = threshold / (2.0 * cross);
  const Complex y = 2.0 * cross * b2 * u - form.t;
  const double c1 = y.imag();
  const double c2 = -y.real();
  const double rhs = b2 - b1;
  const double radius = std::hypot(c1, c2);
  const double tol = 1e-12 * std::max(1.0, radius);
  if (radius <= 1e-300) {
    return rhs <= tol ? CyclicIntervalSet::full() : CyclicIntervalSet::empty();
  }
  if (rhs >= radius + tol) return CyclicIntervalSet::empty();
  if (rhs <= -radius - tol) return CyclicIntervalSet::full();
  const double mu = std::asin(clamp_unit(rhs / radius));
  const double psi = std::atan2(c2, c1);
  return CyclicIntervalSet::arc(mu - psi, kPi - 2.0 * mu);
}

Complex inner_cross(const SubbeamPair& pair) { return pair.w_fixed.dot(pair.w_scan); }

void select_in_set(CombinerSolution& sol, const PhiOptimum& opt,
                   const std::function<double(double)>& objective, bool relaxed) {
  const CyclicIntervalSet& set = sol.feasible_set;
  sol.degenerate_objective = opt.degenerate;
  if (opt.degenerate) {
    sol.phi = set.is_full() ? 0.0 : set.arcs().front().first;
    sol.status = relaxed ? SolveStatus::Relaxed : SolveStatus::InteriorOptimum;
  } else if (set.contains(opt.phi, 1e-12)) {
    sol.phi = opt.phi;
    sol.status = relaxed ? SolveStatus::Relaxed : SolveStatus::InteriorOptimum;
  } else {
    double best_phi = 0.0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (double p : set.endpoints()) {
      const double v = objective(p);
      if (v > best_val) {
        best_val = v;
        best_phi = p;
      }
    }
    sol.phi = best_phi;
    sol.status = relaxed ? SolveStatus::Relaxed : SolveStatus::BoundaryOptimum;
  }
  sol.objective_value = objective(sol.phi);
}

CombinerSolution infeasible_solution(CyclicIntervalSet set) {
  CombinerSolution sol;
  sol.feasible_set = std::move(set);
  sol.status = SolveStatus::Infeasible;
  return sol;
}

}  // namespace

double combined_rx_power(const SubbeamPair& pair, const CMat& channel, double phi) {
  return received_power(channel, combine(pair, phi));
}

double combined_gain(const SubbeamPair& pair, double theta, double phi) {
  return bf_gain(theta, combine(pair, phi));
}

double combined_scan_power(const SubbeamPair& pair, const AngularPowerMatrix& apm, double phi) {
  const CVec w = combine(pair, phi);
  return std::real(w.dot(apm.matrix * w)) / w.squaredNorm();
}

PhiOptimum unconstrained_phi_opt(const SubbeamPair& pair, const CMat& channel) {
  validate_pair(pair);
  if (channel.cols() != pair.w_fixed.size()) {
    throw std::invalid_argument("unconstrained_phi_opt: channel dimension mismatch");
  }
  return maximize_ratio(pair.cross_gain(), inner_cross(pair), rx_form(pair, channel));
}

CyclicIntervalSet feasible_set_gain(const SubbeamPair& pair, std::span<const double> thetas,
                                    std::span<const double> gain_ratios) {
  validate_pair(pair);
  if (thetas.size() != gain_ratios.size() || thetas.empty()) {
    throw std::invalid_argument("feasible_set_gain: need matching non-empty constraint lists");
  }
  const double m = static_cast<double>(pair.w_fixed.size());
  const Complex u = inner_cross(pair);
  CyclicIntervalSet out = CyclicIntervalSet::full();
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (gain_ratios[i] < 0.0) throw std::invalid_argument("feasible_set_gain: negative gain ratio");
    const double threshold = gain_ratios[i] * gain_ratios[i] * (1.0 - pair.rho) * m;
    out = out.intersect(
        ratio_constraint_set(pair.cross_gain(), u, gain_form(pair, thetas[i]), threshold));
    if (out.is_empty()) break;
  }
  return out;
}

RelaxResult relax_gain_constraints(const SubbeamPair& pair, std::span<const double> thetas,
                                   std::span<const double> gain_ratios,
                                   const RelaxOptions& options) {
  RelaxResult res;
  res.bounds.assign(gain_ratios.begin(), gain_ratios.end());
  res.feasible_set = feasible_set_gain(pair, thetas, res.bounds);
  if (!res.feasible_set.is_empty()) return res;

  const std::unordered_set<int> keep(options.prioritized.begin(), options.prioritized.end());
  for (int round = 1; round <= options.max_rounds; ++round) {
    bool changed = false;
    for (std::size_t i = 0; i < res.bounds.size(); ++i) {
      if (keep.count(static_cast<int>(i)) == 0) {
        res.bounds[i] *= options.decay;
        changed = true;
      }
    }
    res.rounds = round;
    if (!changed) break;  // every constraint prioritized: nothing to reduce
    res.feasible_set = feasible_set_gain(pair, thetas, res.bounds);
    if (!res.feasible_set.is_empty()) return res;
  }
  res.exhausted = true;
  return res;
}

CombinerSolution solve_p1(const SubbeamPair& pair, const CMat& channel,
                          std::span<const double> thetas, std::span<const double> gain_ratios,
                          const RelaxOptions& relax) {
  CombinerSolution sol;
  sol.feasible_set = feasible_set_gain(pair, thetas, gain_ratios);
  sol.applied_bounds.assign(gain_ratios.begin(), gain_ratios.end());
  bool relaxed = false;
  if (sol.feasible_set.is_empty()) {
    if (!relax.enabled) return infeasible_solution(std::move(sol.feasible_set));
    RelaxResult rr = relax_gain_constraints(pair, thetas, gain_ratios, relax);
    if (rr.exhausted) return infeasible_solution(std::move(rr.feasible_set));
    sol.feasible_set = std::move(rr.feasible_set);
    sol.applied_bounds = std::move(rr.bounds);
    sol.relaxation_rounds = rr.rounds;
    relaxed = true;
  }
  select_in_set(sol, unconstrained_phi_opt(pair, channel),
                [&](double phi) { return combined_rx_power(pair, channel, phi); }, relaxed);
  return sol;
}

CyclicIntervalSet feasible_set_power(const SubbeamPair& pair, const AngularPowerMatrix& apm,
                                     double power_ratio, const CVec& w_ref) {
  validate_pair(pair);
  if (w_ref.size() != pair.w_fixed.size()) {
    throw std::invalid_argument("feasible_set_power: reference weight dimension mismatch");
  }
  const double ref_power = std::real(w_ref.dot(apm.matrix * w_ref));
  const double threshold = power_ratio * ref_power;
  return ratio_constraint_set(pair.cross_gain(), inner_cross(pair), power_form(pair, apm),
                              threshold);
}

CombinerSolution solve_p2(const SubbeamPair& pair, const CMat& channel,
                          const AngularPowerMatrix& apm, double power_ratio, const CVec& w_ref,
                          const RelaxOptions& relax) {
  CombinerSolution sol;
  sol.feasible_set = feasible_set_power(pair, apm, power_ratio, w_ref);
  sol.applied_bounds = {power_ratio};
  bool relaxed = false;
  if (sol.feasible_set.is_empty()) {
    if (!relax.enabled) return infeasible_solution(std::move(sol.feasible_set));
    double bound = power_ratio;
    int round = 0;
    while (round < relax.max_rounds && sol.feasible_set.is_empty()) {
      bound *= relax.decay;
      ++round;
      sol.feasible_set = feasible_set_power(pair, apm, bound, w_ref);
    }
    if (sol.feasible_set.is_empty()) return infeasible_solution(std::move(sol.feasible_set));
    sol.applied_bounds = {bound};
    sol.relaxation_rounds = round;
    relaxed = true;
  }
  select_in_set(sol, unconstrained_phi_opt(pair, channel),
                [&](double phi) { return combined_rx_power(pair, channel, phi); }, relaxed);
  return sol;
}

PhiOptimum phi_smax_gain(const SubbeamPair& pair, double theta_scan) {
  validate_pair(pair);
  return maximize_ratio(pair.cross_gain(), inner_cross(pair), gain_form(pair, theta_scan));
}

PhiOptimum phi_smax_power(const SubbeamPair& pair, const AngularPowerMatrix& apm) {
  validate_pair(pair);
  return maximize_ratio(pair.cross_gain(), inner_cross(pair), power_form(pair, apm));
}

double communication_reference_power(const SubbeamPair& pair, const CMat& channel) {
  // Received power with the scanning subbeam switched off: the fixed subbeam
  // alone at its allocated power share. Referencing the full transmit power
  // instead would make beamwidth-scale thresholds unreachable for an even
  // power split.
  return pair.rho * (channel * pair.w_fixed).squaredNorm();
}

CyclicIntervalSet feasible_set_rxpower(const SubbeamPair& pair, const CMat& channel,
                                       double rx_ratio) {
  validate_pair(pair);
  return ratio_constraint_set(pair.cross_gain(), inner_cross(pair), rx_form(pair, channel),
                              rx_ratio * communication_reference_power(pair, channel));
}

CombinerSolution solve_p3(const SubbeamPair& pair, const CMat& channel, double theta_scan,
                          double rx_ratio) {
  CombinerSolution sol;
  sol.feasible_set = feasible_set_rxpower(pair, channel, rx_ratio);
  if (sol.feasible_set.is_empty()) return infeasible_solution(std::move(sol.feasible_set));
  select_in_set(sol, phi_smax_gain(pair, theta_scan),
                [&](double phi) { return combined_gain(pair, theta_scan, phi); },
                /*relaxed=*/false);
  return sol;
}

CombinerSolution solve_p4(const SubbeamPair& pair, const CMat& channel,
                          const AngularPowerMatrix& apm, double rx_ratio) {
  CombinerSolution sol;
  sol.feasible_set = feasible_set_rxpower(pair, channel, rx_ratio);
  if (sol.feasible_set.is_empty()) return infeasible_solution(std::move(sol.feasible_set));
  select_in_set(sol, phi_smax_power(pair, apm),
                [&](double phi) { return combined_scan_power(pair, apm, phi); },
                /*relaxed=*/false);
  return sol;
}

CrossTerms cross_terms(const SubbeamPair& pair, const CMat& channel, double theta,
                       const AngularPowerMatrix* apm) {
  validate_pair(pair);
  CrossTerms ct;
  const Complex u = inner_cross(pair);
  ct.b1 = std::abs(u);
  ct.beta1 = std::arg(u);
  const CVec a = steering_vector(theta, static_cast<int>(pair.w_fixed.size()));
  const Complex v2 = (pair.w_fixed.dot(a.conjugate()));
  const Complex v3 = a.cwiseProduct(pair.w_scan).sum();
  ct.b2 = std::abs(v2);
  ct.beta2 = std::arg(v2);
  ct.b3 = std::abs(v3);
  ct.beta3 = std::arg(v3);
  if (apm != nullptr) {
    const Complex tp = pair.w_fixed.dot(apm->matrix * pair.w_scan);
    ct.bp = std::abs(tp);
    ct.beta_p = std::arg(tp);
  }
  const Complex tg = (channel * pair.w_fixed).dot(channel * pair.w_scan);
  ct.bg = std::abs(tg);
  ct.beta_g = std::arg(tg);
  return ct;
}

}  // namespace jcasbeam
