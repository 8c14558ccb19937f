#include "jcasbeam/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace jcasbeam {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kStepFraction = 0.98;

// Cone element: one dense PSD block plus nonnegative slack scalars.
struct BlockVec {
  RMat psd;
  RVec lin;

  static BlockVec zero(int n, int m) { return {RMat::Zero(n, n), RVec::Zero(m)}; }
  static BlockVec identity(int n, int m) { return {RMat::Identity(n, n), RVec::Ones(m)}; }

  BlockVec& axpy(double a, const BlockVec& v) {
    psd.noalias() += a * v.psd;
    lin.noalias() += a * v.lin;
    return *this;
  }
};

double dot(const BlockVec& a, const BlockVec& b) {
  return a.psd.cwiseProduct(b.psd).sum() + a.lin.dot(b.lin);
}

double inf_norm(const BlockVec& a) {
  double n = a.psd.size() > 0 ? a.psd.cwiseAbs().maxCoeff() : 0.0;
  if (a.lin.size() > 0) n = std::max(n, a.lin.cwiseAbs().maxCoeff());
  return n;
}

// Nesterov-Todd scaling state: W_nt S W_nt = X on the PSD block, w2 = x/s on
// the slack block. scaled(U) applies U -> W U W blockwise.
struct Scaling {
  RMat w_nt;
  RVec w2;

  BlockVec apply(const BlockVec& u) const {
    return {w_nt * u.psd * w_nt, w2.cwiseProduct(u.lin)};
  }
};

RMat sym_sqrt(const RMat& a, bool invert) {
  Eigen::SelfAdjointEigenSolver<RMat> eig(a);
  const double floor = 1e-14 * std::max(eig.eigenvalues().maxCoeff(), 1e-300);
  RVec s(eig.eigenvalues().size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double r = std::sqrt(std::max(eig.eigenvalues()[i], floor));
    s[i] = invert ? 1.0 / r : r;
  }
  return eig.eigenvectors() * s.asDiagonal() * eig.eigenvectors().transpose();
}

// Largest step a with X + a*D staying in the cone; +inf when unconstrained.
double max_step_psd(const RMat& x, const RMat& d) {
  Eigen::LLT<RMat> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const RMat l_inv_d = llt.matrixL().solve(d);
  const RMat t = llt.matrixL().solve(l_inv_d.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> eig(0.5 * (t + t.transpose()));
  const double lam = eig.eigenvalues().minCoeff();
  if (lam >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lam;
}

double max_step(const BlockVec& x, const BlockVec& d) {
  double a = max_step_psd(x.psd, d.psd);
  for (Eigen::Index i = 0; i < x.lin.size(); ++i) {
    if (d.lin[i] < 0.0) a = std::min(a, -x.lin[i] / d.lin[i]);
  }
  return a;
}

void check_symmetric(const RMat& a, const char* what) {
  if (a.rows() != a.cols()) throw std::invalid_argument(std::string(what) + ": not square");
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (asym > 1e-12 * scale) {
    throw std::invalid_argument(std::string(what) + ": matrix not symmetric");
  }
}

}  // namespace

std::string SdpProblem::to_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "sdp " << dimension << ' ' << (sense == SdpSense::Maximize ? "maximize" : "minimize")
     << ' ' << constraints.size() << '\n';
  auto dump = [&](const RMat& m) {
    for (int r = 0; r < dimension; ++r) {
      for (int c = 0; c < dimension; ++c) os << m(r, c) << (c + 1 == dimension ? '\n' : ' ');
    }
  };
  dump(objective);
  for (const auto& con : constraints) {
    os << (con.relation == SdpRelation::LessEqual ? "LE" : "GE") << ' ' << con.bound << '\n';
    dump(con.matrix);
  }
  return os.str();
}

SdpProblem SdpProblem::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string tag, sense_word;
  SdpProblem p;
  std::size_t num_constraints = 0;
  if (!(is >> tag >> p.dimension >> sense_word >> num_constraints) || tag != "sdp") {
    throw std::invalid_argument("SdpProblem::from_text: bad header");
  }
  p.sense = sense_word == "maximize" ? SdpSense::Maximize : SdpSense::Minimize;
  auto load = [&](RMat& m) {
    m.resize(p.dimension, p.dimension);
    for (int r = 0; r < p.dimension; ++r) {
      for (int c = 0; c < p.dimension; ++c) {
        if (!(is >> m(r, c))) throw std::invalid_argument("SdpProblem::from_text: short matrix");
      }
    }
  };
  load(p.objective);
  for (std::size_t k = 0; k < num_constraints; ++k) {
    SdpConstraint con;
    std::string rel;
    if (!(is >> rel >> con.bound)) throw std::invalid_argument("SdpProblem::from_text: bad constraint");
    con.relation = rel == "LE" ? SdpRelation::LessEqual : SdpRelation::GreaterEqual;
    load(con.matrix);
    p.constraints.push_back(std::move(con));
  }
  return p;
}

SdpSolution solve_sdp(const SdpProblem& problem, double tol) {
  if (problem.dimension < 1) throw std::invalid_argument("solve_sdp: empty problem");
  if (tol <= 0.0) throw std::invalid_argument("solve_sdp: tolerance must be positive");
  check_symmetric(problem.objective, "solve_sdp objective");
  for (const auto& con : problem.constraints) check_symmetric(con.matrix, "solve_sdp constraint");

  const int n = problem.dimension;
  const int m = static_cast<int>(problem.constraints.size());
  const int n_eq = m + 1;
  const double flip = problem.sense == SdpSense::Maximize ? -1.0 : 1.0;

  // Internal minimization data: equality 0 is the trace normalization, each
  // inequality gets one slack scalar with sign +1 (LE) or -1 (GE).
  BlockVec cost{flip * 0.5 * (problem.objective + problem.objective.transpose()),
                RVec::Zero(m)};
  std::vector<BlockVec> eq(n_eq, BlockVec::zero(n, m));
  RVec b(n_eq);
  eq[0].psd = RMat::Identity(n, n);
  b[0] = 1.0;
  for (int k = 0; k < m; ++k) {
    const auto& con = problem.constraints[k];
    eq[k + 1].psd = 0.5 * (con.matrix + con.matrix.transpose());
    eq[k + 1].lin[k] = con.relation == SdpRelation::LessEqual ? 1.0 : -1.0;
    b[k + 1] = con.bound;
  }

  const double nu = n + m;  // barrier parameter of the cone
  BlockVec x = BlockVec::identity(n, m);
  BlockVec s = BlockVec::identity(n, m);
  RVec y = RVec::Zero(n_eq);
  double tau = 1.0, kappa = 1.0;

  const double b_scale = 1.0 + b.cwiseAbs().maxCoeff();
  const double c_scale = 1.0 + inf_norm(cost);

  SdpSolution out;
  out.W = RMat::Zero(n, n);
  RMat best_w = RMat::Zero(n, n);
  double best_quality = std::numeric_limits<double>::infinity();
  double best_obj = 0.0, best_gap = 0.0;
  int best_iter = -1;

  auto apply_a = [&](const BlockVec& v) {
    RVec r(n_eq);
    for (int i = 0; i < n_eq; ++i) r[i] = dot(eq[i], v);
    return r;
  };
  auto apply_at = [&](const RVec& w) {
    BlockVec r = BlockVec::zero(n, m);
    for (int i = 0; i < n_eq; ++i) r.axpy(w[i], eq[i]);
    return r;
  };

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    out.iterations = iter;
    // Residuals of the self-dual system.
    RVec r_p = apply_a(x) - b * tau;
    BlockVec r_d = apply_at(y);
    r_d.psd = -r_d.psd + cost.psd * tau - s.psd;
    r_d.lin = -r_d.lin + cost.lin * tau - s.lin;
    const double cx = dot(cost, x);
    const double by = b.dot(y);
    const double r_g = by - cx - kappa;
    const double mu = (dot(x, s) + tau * kappa) / (nu + 1.0);

    // Optimality: KKT residuals and gap within tol * (1 + |objective|),
    // with residuals additionally scaled by the data magnitudes.
    const double pobj = cx / tau;
    const double dobj = by / tau;
    const double pres = r_p.cwiseAbs().maxCoeff() / (tau * b_scale);
    const double dres = inf_norm(r_d) / (tau * c_scale);
    const double gap = std::abs(pobj - dobj);
    const double quality = std::max({pres, dres, gap / (1.0 + std::abs(pobj))});
    if (quality < best_quality && std::isfinite(quality)) {
      best_quality = quality;
      best_w = x.psd / tau;
      best_obj = pobj;
      best_gap = gap;
      best_iter = iter;
    }
    if (pres <= tol * (1.0 + std::abs(pobj)) && dres <= tol * (1.0 + std::abs(pobj)) &&
        gap <= tol * (1.0 + std::abs(pobj))) {
      out.status = SdpStatus::Optimal;
      out.W = x.psd / tau;
      out.W = 0.5 * (out.W + out.W.transpose());
      out.objective_value = flip * pobj;
      out.duality_gap = gap;
      return out;
    }

    // Infeasibility certificates from the homogeneous model.
    if (by > 0.0) {
      BlockVec aty = apply_at(y);
      aty.axpy(1.0, s);  // A*(y) + S ~ C tau -> 0 certifies primal infeasibility
      if (inf_norm(aty) <= tol * by) {
        out.status = SdpStatus::Infeasible;
        out.certificate = "primal infeasible: dual improving ray with b'y = " + std::to_string(by);
        return out;
      }
    }
    if (cx < 0.0) {
      RVec ax = apply_a(x);
      if (ax.cwiseAbs().maxCoeff() <= tol * (-cx)) {
        out.status = SdpStatus::Infeasible;
        out.certificate = "dual infeasible: primal improving ray with c'x = " + std::to_string(cx);
        return out;
      }
    }

    // Nesterov-Todd scaling.
    const RMat x_half = sym_sqrt(x.psd, false);
    const RMat inner = x_half * s.psd * x_half;
    Scaling w{x_half * sym_sqrt(0.5 * (inner + inner.transpose()), true) * x_half,
              x.lin.cwiseQuotient(s.lin)};

    // Schur complement pieces shared by predictor and corrector.
    std::vector<BlockVec> scaled_eq(n_eq);
    for (int i = 0; i < n_eq; ++i) scaled_eq[i] = w.apply(eq[i]);
    RMat schur(n_eq, n_eq);
    for (int i = 0; i < n_eq; ++i) {
      for (int j = 0; j <= i; ++j) {
        schur(i, j) = schur(j, i) = dot(eq[i], scaled_eq[j]);
      }
    }
    const BlockVec wcw = w.apply(cost);
    RVec u = apply_a(wcw);
    const double c_ww = dot(cost, wcw);
    const BlockVec wrdw = w.apply(r_d);
    const RVec a_wrdw = apply_a(wrdw);
    const double c_wrdw = dot(cost, wrdw);

    RMat kkt(n_eq + 1, n_eq + 1);
    kkt.topLeftCorner(n_eq, n_eq) = schur;
    kkt.topRightCorner(n_eq, 1) = -(u + b);
    kkt.bottomLeftCorner(1, n_eq) = (b - u).transpose();
    kkt(n_eq, n_eq) = c_ww + kappa / tau;
    Eigen::PartialPivLU<RMat> kkt_lu(kkt);

    Eigen::LLT<RMat> s_llt(s.psd);
    if (s_llt.info() != Eigen::Success) break;
    RMat s_inv = s_llt.solve(RMat::Identity(n, n));
    s_inv = 0.5 * (s_inv + s_inv.transpose());

    auto solve_direction = [&](double sigma, BlockVec& dx, BlockVec& ds, RVec& dy, double& dtau,
                               double& dkappa) {
      // Complementarity targets.
      BlockVec rc;
      rc.psd = sigma * mu * s_inv - x.psd;
      rc.lin = sigma * mu * s.lin.cwiseInverse() - x.lin;

      RVec h(n_eq + 1);
      h.head(n_eq) = -r_p - apply_a(rc) + a_wrdw;
      h[n_eq] = -r_g + dot(cost, rc) - c_wrdw + sigma * mu / tau - kappa;
      const RVec sol = kkt_lu.solve(h);
      dy = sol.head(n_eq);
      dtau = sol[n_eq];

      ds = apply_at(dy);
      ds.psd = -ds.psd + cost.psd * dtau + r_d.psd;
      ds.lin = -ds.lin + cost.lin * dtau + r_d.lin;
      const BlockVec wdsw = w.apply(ds);
      dx.psd = rc.psd - wdsw.psd;
      dx.lin = rc.lin - wdsw.lin;
      dkappa = sigma * mu / tau - kappa - (kappa / tau) * dtau;
    };

    auto step_limit = [&](const BlockVec& dx, const BlockVec& ds, double dtau, double dkappa) {
      double a = std::min(max_step(x, dx), max_step(s, ds));
      if (dtau < 0.0) a = std::min(a, -tau / dtau);
      if (dkappa < 0.0) a = std::min(a, -kappa / dkappa);
      return a;
    };

    // Predictor (affine) pass fixes the centering weight.
    BlockVec dx_a, ds_a;
    RVec dy_a;
    double dtau_a = 0.0, dkappa_a = 0.0;
    solve_direction(0.0, dx_a, ds_a, dy_a, dtau_a, dkappa_a);
    const double alpha_a = std::min(1.0, kStepFraction * step_limit(dx_a, ds_a, dtau_a, dkappa_a));
    BlockVec x_a = x, s_a = s;
    x_a.axpy(alpha_a, dx_a);
    s_a.axpy(alpha_a, ds_a);
    const double mu_aff = (dot(x_a, s_a) + (tau + alpha_a * dtau_a) * (kappa + alpha_a * dkappa_a)) /
                          (nu + 1.0);
    double sigma = 0.5;
    if (std::isfinite(mu_aff) && mu > 0.0) {
      const double ratio = std::clamp(mu_aff / mu, 0.0, 1.0);
      sigma = ratio * ratio * ratio;
    }

    BlockVec dx, ds;
    RVec dy;
    double dtau = 0.0, dkappa = 0.0;
    solve_direction(sigma, dx, ds, dy, dtau, dkappa);
    double alpha = std::min(1.0, kStepFraction * step_limit(dx, ds, dtau, dkappa));
    if (!std::isfinite(alpha) || alpha <= 1e-12 || !std::isfinite(dot(dx, ds)) ||
        !std::isfinite(dtau) || !std::isfinite(dkappa)) {
      break;
    }

    x.axpy(alpha, dx);
    s.axpy(alpha, ds);
    y += alpha * dy;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
    x.psd = 0.5 * (x.psd + x.psd.transpose());
    s.psd = 0.5 * (s.psd + s.psd.transpose());
    if (!(tau > 0.0) || !(kappa > 0.0) || !std::isfinite(dot(x, s))) break;
  }

  // Stalled: fall back to the best iterate if it still meets a modestly
  // relaxed version of the optimality contract.
  if (best_iter >= 0 && best_quality <= 100.0 * tol * (1.0 + std::abs(best_obj))) {
    out.status = SdpStatus::Optimal;
    out.W = 0.5 * (best_w + best_w.transpose());
    out.objective_value = flip * best_obj;
    out.duality_gap = best_gap;
    out.iterations = best_iter;
    return out;
  }
  out.status = SdpStatus::NumericalFailure;
  out.certificate = "interior-point iteration limit or stalled step";
  return out;
}

}  // namespace jcasbeam
