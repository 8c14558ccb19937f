#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "jcasbeam/combiner.hpp"
#include "jcasbeam/oracle.hpp"
#include "jcasbeam/sdr.hpp"
#include "test_util.hpp"

using namespace jcasbeam;
using namespace jcasbeam::testutil;

namespace {

DesiredPattern random_desired(Rng& rng, int grid_points) {
  DesiredPattern d;
  d.grid.resize(grid_points);
  for (int i = 0; i < grid_points; ++i) d.grid[i] = rng.uniform(-1.4, 1.4);
  d.weights = RVec::Ones(grid_points);
  d.magnitudes.resize(grid_points);
  for (int i = 0; i < grid_points; ++i) d.magnitudes[i] = rng.uniform(0.05, 2.0);
  d.phases.resize(grid_points);
  for (int i = 0; i < grid_points; ++i) d.phases[i] = std::polar(1.0, rng.uniform(-kPi, kPi));
  return d;
}

GlobalInputs paper_inputs(const CMat& h, double scan_dir_rad, int m = 16, int ks = 12) {
  GlobalInputs gi;
  gi.channel = h;
  gi.num_elements = m;
  SubbeamPair pair{conventional_beam(m, m, 0.0), steer(conventional_beam(ks, m, 0.0), scan_dir_rad),
                   0.5};
  const auto grid = default_angle_grid();
  gi.desired = desired_multibeam(pair, grid);
  // Waveform budget referenced to the ILS fit of the flat-phase desired.
  const CVec w_ref = ils_synthesize(gi.desired, m, 50).weights;
  gi.waveform_bound = 0.68 * waveform_mse(w_ref, gi.desired);
  gi.scan_direction = scan_dir_rad;
  return gi;
}

}  // namespace

TEST_CASE("real embedding block layout") {
  CVec w1(1);
  w1 << Complex(1, 1);
  const RVec e = embed_complex_vector(w1);
  CHECK(e.size() == 2);
  CHECK(e[0] == 1.0);
  CHECK(e[1] == 1.0);

  CMat j11(1, 1);
  j11 << Complex(0, 1);
  const RMat em = embed_complex_matrix(j11);
  CHECK(em(0, 0) == 0.0);
  CHECK(em(0, 1) == -1.0);
  CHECK(em(1, 0) == 1.0);
  CHECK(em(1, 1) == 0.0);
}

TEST_CASE("embedding preserves norms and quadratic forms") {
  Rng rng(501);
  for (int t = 0; t < 100; ++t) {
    const CMat h = random_complex_matrix(rng, 5, 5);
    const CVec w = random_complex_vector(rng, 5);
    const RVec we = embed_complex_vector(w);
    CHECK(we.norm() == doctest::Approx(w.norm()).epsilon(1e-12));
    const RMat he = embed_complex_matrix(h);
    const double real_form = we.dot(he.transpose() * he * we);
    CHECK(real_form == doctest::Approx((h * w).squaredNorm()).epsilon(1e-10));
  }
}

TEST_CASE("waveform quadratic equals the complex mismatch") {
  Rng rng(502);
  for (int t = 0; t < 50; ++t) {
    const int m = 4 + static_cast<int>(rng.raw() % 4);
    DesiredPattern d = random_desired(rng, 24);
    const RMat quad = build_waveform_quadratic(d, m);
    CHECK((quad - quad.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    const CVec w = random_complex_vector(rng, m);
    const RVec we = embed_complex_vector(w);
    CHECK(we.dot(quad * we) ==
          doctest::Approx(waveform_mse(w, d) * w.squaredNorm() / w.squaredNorm())
              .epsilon(1e-9));
    // waveform_mse normalizes nothing: evaluate the raw complex expression.
    const CVec pat = pattern(w, d.grid);
    const double c = optimal_pattern_scale(pat, d);
    const double complex_value =
        (d.weights.cast<Complex>().cwiseProduct(pat - c * d.desired_waveform())).squaredNorm();
    CHECK(we.dot(quad * we) == doctest::Approx(complex_value).epsilon(1e-9));
  }
}

TEST_CASE("waveform quadratic is PSD and vanishes on a perfect match") {
  Rng rng(503);
  const int m = 6;
  DesiredPattern d = random_desired(rng, 20);
  const CVec w = random_complex_vector(rng, m);
  const CVec pat = pattern(w, d.grid);
  d.magnitudes = 3.0 * pat.cwiseAbs();
  for (int i = 0; i < 20; ++i) d.phases[i] = std::polar(1.0, std::arg(pat[i]));
  const RMat quad = build_waveform_quadratic(d, m);
  const RVec we = embed_complex_vector(w);
  CHECK(we.dot(quad * we) < 1e-9);
  Eigen::SelfAdjointEigenSolver<RMat> eig(quad);
  CHECK(eig.eigenvalues().minCoeff() > -1e-10);

  DesiredPattern zero = d;
  zero.magnitudes.setZero();
  CHECK_THROWS_AS(build_waveform_quadratic(zero, m), std::invalid_argument);
}

TEST_CASE("gain quadratic is PSD with rank at most two") {
  const RMat g = build_gain_quadratic(0.35, 8);
  CHECK((g - g.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<RMat> eig(g);
  CHECK(eig.eigenvalues().minCoeff() > -1e-10);
  int positive = 0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    if (eig.eigenvalues()[i] > 1e-9) ++positive;
  }
  CHECK(positive <= 2);
}

TEST_CASE("quadratics match their complex counterparts on random weights") {
  Rng rng(504);
  const int m = 6;
  const auto apm = angular_power_matrix(-0.4, 0.1, 16, m);
  const RMat power_quad = build_power_quadratic(apm);
  const RMat gain_quad = build_gain_quadratic(0.2, m);
  for (int t = 0; t < 200; ++t) {
    const CVec w = random_complex_vector(rng, m);
    const RVec we = embed_complex_vector(w);
    const double apow = std::real(w.dot(apm.matrix * w));
    CHECK(we.dot(power_quad * we) == doctest::Approx(apow).epsilon(1e-9));
    CHECK(we.dot(gain_quad * we) ==
          doctest::Approx(bf_gain(0.2, w) * w.squaredNorm()).epsilon(1e-9));
  }
}

TEST_CASE("rank-one extraction") {
  Rng rng(505);
  RVec v(6);
  for (int i = 0; i < 6; ++i) v[i] = rng.gaussian();
  const RMat w = v * v.transpose();
  const auto ext = extract_rank1(w);
  CHECK(ext.rank_ratio < 1e-12);
  CHECK_FALSE(ext.ambiguous);
  const double align = std::abs(ext.vector.dot(v)) / (ext.vector.norm() * v.norm());
  CHECK(align == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(ext.vector.norm() == doctest::Approx(v.norm()).epsilon(1e-10));

  RMat deg = RMat::Zero(4, 4);
  deg(0, 0) = 0.5;
  deg(1, 1) = 0.5;
  const auto amb = extract_rank1(deg);
  CHECK(amb.rank_ratio == doctest::Approx(1.0));
  CHECK(amb.ambiguous);

  CHECK_THROWS_AS(extract_rank1(RMat::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("real to complex conversion") {
  RVec a(2);
  a << 1.0, 0.0;
  const CVec w1 = real_to_complex_unit(a);
  CHECK(w1.size() == 1);
  CHECK(std::abs(w1[0] - Complex(1, 0)) < 1e-15);

  RVec b(2);
  b << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const CVec w2 = real_to_complex_unit(b);
  CHECK(std::abs(w2[0] - Complex(1, 1) / std::sqrt(2.0)) < 1e-14);

  Rng rng(506);
  for (int t = 0; t < 50; ++t) {
    const CVec w = random_complex_vector(rng, 5);
    const CVec round = real_to_complex_unit(embed_complex_vector(w));
    const Complex corr = round.dot(w / w.norm());
    CHECK(std::abs(corr) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(real_to_complex_unit(RVec::Zero(4)), std::invalid_argument);
}

TEST_CASE("P5 without constraints recovers the dominant singular direction") {
  Rng rng(507);
  const CMat h = random_complex_matrix(rng, 6, 6);
  GlobalInputs gi;
  gi.channel = h;
  gi.num_elements = 6;
  gi.desired = random_desired(rng, 16);  // unused without a waveform bound
  const SdpProblem p = build_sdp(GlobalKind::P5RxPower, gi);
  CHECK(p.constraints.empty());
  const auto sol = solve_sdp(p);
  REQUIRE(sol.status == SdpStatus::Optimal);
  const auto ext = extract_rank1(sol.W);
  Eigen::SelfAdjointEigenSolver<RMat> eig(build_rx_quadratic(h));
  const RVec top = eig.eigenvectors().col(11);
  const double angle_cos = std::abs(ext.vector.normalized().dot(top));
  CHECK(angle_cos > 1.0 - 1e-4);
  CHECK(sol.objective_value == doctest::Approx(eig.eigenvalues().maxCoeff()).epsilon(1e-7));
}

TEST_CASE("P6 with a zero received-power bound lower-bounds the ILS fit") {
  Rng rng(508);
  const CMat h = random_complex_matrix(rng, 8, 8);
  GlobalInputs gi;
  gi.channel = h;
  gi.num_elements = 8;
  SubbeamPair pair = conventional_pair(8, 6, 0.0, 0.3, 0.5);
  gi.desired = desired_multibeam(pair, default_angle_grid(91));
  gi.rx_power_bound = 0.0;
  const SdpProblem p = build_sdp(GlobalKind::P6WaveformFit, gi);
  const auto sol = solve_sdp(p);
  REQUIRE(sol.status == SdpStatus::Optimal);
  const CVec w_ils = ils_synthesize(gi.desired, 8, 1).weights;  // flat-phase fit
  CHECK(sol.objective_value <= waveform_mse(w_ils, gi.desired) + 1e-6);
}

TEST_CASE("P7 problem matrices are symmetric") {
  Rng rng(509);
  const CMat h = random_complex_matrix(rng, 6, 6);
  GlobalInputs gi;
  gi.channel = h;
  gi.num_elements = 6;
  SubbeamPair pair = conventional_pair(6, 4, 0.0, 0.4, 0.5);
  gi.desired = desired_multibeam(pair, default_angle_grid(61));
  gi.waveform_bound = 100.0;
  gi.rx_power_bound = 0.1;
  gi.scan_direction = 0.4;
  const SdpProblem p = build_sdp(GlobalKind::P7ScanGain, gi);
  CHECK((p.objective - p.objective.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  for (const auto& con : p.constraints) {
    CHECK((con.matrix - con.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(p.constraints.size() == 2);
}

TEST_CASE("build_sdp validates inputs") {
  Rng rng(510);
  GlobalInputs gi;
  gi.channel = random_complex_matrix(rng, 4, 4);
  gi.num_elements = 4;
  gi.desired = random_desired(rng, 12);
  CHECK_THROWS_AS(build_sdp(GlobalKind::P6WaveformFit, gi), std::invalid_argument);
  CHECK_THROWS_AS(build_sdp(GlobalKind::P8ScanPower, gi), std::invalid_argument);
  gi.gain_directions = {0.1};
  CHECK_THROWS_AS(build_sdp(GlobalKind::P5RxPower, gi), std::invalid_argument);
}

TEST_CASE("sdp_ils recovers the matched beam for a single-lobe target") {
  // Pure LOS channel, desired pattern from the matched beam alone, loose
  // waveform budget: the global received-power design must align with the
  // conventional matched filter.
  const int m = 8;
  const double los = deg2rad(12.0);
  const auto ch = build_channel({{Complex(1, 0), los, 0.0}}, m, m);
  GlobalInputs gi;
  gi.channel = ch.matrix;
  gi.num_elements = m;
  const CVec matched = conventional_beam(m, m, los);
  DesiredPattern d;
  d.grid = default_angle_grid(121);
  const CVec pat = pattern(matched, d.grid);
  d.weights = RVec::Ones(121);
  d.magnitudes = pat.cwiseAbs();
  d.phases = CVec::Ones(121);
  gi.desired = d;
  gi.waveform_bound = 1e3;
  const auto sol = sdp_ils(GlobalKind::P5RxPower, gi, {.max_outer_iters = 5});
  REQUIRE(sol.status == GlobalStatus::Optimal);
  CHECK(std::abs(sol.w_t.dot(matched)) > 1.0 - 1e-2);
  for (double s : sol.constraint_slack) CHECK(s >= -1e-6);
}

TEST_CASE("sdp_ils on the paper setup") {
  ChannelSimConfig cfg;
  Rng seeds(511);
  int converged_fast = 0;
  const int trials = 5;
  for (int t = 0; t < trials; ++t) {
    const CMat h = sample_rician_channel(cfg, 3000 + t).matrix;
    GlobalInputs gi = paper_inputs(h, deg2rad(-6.45));
    SdpIlsOptions opts;
    opts.max_outer_iters = 8;
    opts.stop_early = false;
    const auto sol = sdp_ils(GlobalKind::P5RxPower, gi, opts);
    REQUIRE(sol.status == GlobalStatus::Optimal);
    CHECK(sol.rank_ratio < 1e-6);
    for (double s : sol.constraint_slack) CHECK(s >= -1e-6);
    if (sol.converged_at >= 1 && sol.converged_at <= 6) ++converged_fast;

    // Relaxation upper-bounds every feasible rank-one point, and the
    // extracted beamformer must essentially attain the SDP objective.
    SubbeamPair pair{conventional_beam(16, 16, 0.0),
                     steer(conventional_beam(12, 16, 0.0), deg2rad(-6.45)), 0.5};
    const auto comb = unconstrained_phi_opt(pair, h);
    CVec w_comb = combine(pair, comb.phi);
    w_comb /= w_comb.norm();
    const RVec we = embed_complex_vector(w_comb);
    const RMat waveform = build_waveform_quadratic(gi.desired, 16);
    const bool feasible = we.dot(waveform * we) <= *gi.waveform_bound + 1e-9;
    if (feasible) {
      CHECK(sol.objective_value >= (h * w_comb).squaredNorm() - 1e-6);
    }
    CHECK(sol.rx_power >= sol.objective_value - 1e-5 * (1 + sol.objective_value));
  }
  CHECK(converged_fast >= 3);
}

TEST_CASE("sdp_ils at small scale dominates sampled feasible vectors") {
  ChannelSimConfig cfg;
  cfg.tx_elements = 4;
  cfg.rx_elements = 4;
  const CMat h = sample_rician_channel(cfg, 77).matrix;
  GlobalInputs gi = paper_inputs(h, deg2rad(10.0), 4, 3);
  const auto sol = sdp_ils(GlobalKind::P5RxPower, gi, {});
  REQUIRE(sol.status == GlobalStatus::Optimal);

  const RMat waveform = build_waveform_quadratic(gi.desired, 4);
  std::vector<std::function<double(const CVec&)>> cons{[&](const CVec& w) {
    const RVec we = embed_complex_vector(w);
    return *gi.waveform_bound - we.dot(waveform * we);
  }};
  const auto oracle = sampled_search_w(
      [&](const CVec& w) { return (h * w).squaredNorm(); }, cons, 4, 20000, 123);
  if (oracle.found) {
    CHECK(sol.rx_power >= oracle.value - 1e-6);
  }
}

TEST_CASE("sdp_ils reports infeasibility with the failing iteration") {
  Rng rng(512);
  const CMat h = random_complex_matrix(rng, 4, 4);
  GlobalInputs gi;
  gi.channel = h;
  gi.num_elements = 4;
  gi.desired = random_desired(rng, 12);
  gi.waveform_bound = 100.0;
  // Impossible gain demand: above the array size.
  gi.gain_directions = {0.2};
  gi.gain_bounds = {100.0};
  const auto sol = sdp_ils(GlobalKind::P5RxPower, gi, {});
  CHECK(sol.status == GlobalStatus::Infeasible);
  CHECK(sol.failed_iteration == 1);
}
