#include <doctest.h>

#include "jcasbeam/array.hpp"
#include "jcasbeam/oracle.hpp"
#include "test_util.hpp"

using namespace jcasbeam;
using namespace jcasbeam::testutil;

namespace {

double approx_diff(const CVec& a, const CVec& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("steering vector closed-form values") {
  CHECK(approx_diff(steering_vector(0.0, 4), CVec::Ones(4)) < 1e-15);

  CVec expect2(2);
  expect2 << Complex(1, 0), Complex(-1, 0);
  CHECK(approx_diff(steering_vector(kPi / 2, 2), expect2) < 1e-12);

  CVec expect3(3);
  expect3 << Complex(1, 0), Complex(0, 1), Complex(-1, 0);
  CHECK(approx_diff(steering_vector(kPi / 6, 3), expect3) < 1e-12);
}

TEST_CASE("steering vector elements stay unit modulus") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const CVec a = steering_vector(rng.uniform(-kPi / 2, kPi / 2), 16);
    for (int m = 0; m < 16; ++m) CHECK(std::abs(a[m]) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("steering vector rejects bad input") {
  CHECK_THROWS_AS(steering_vector(0.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(steering_vector(1.6, 4), std::invalid_argument);
  CHECK_THROWS_AS(steering_vector(-1.6, 4), std::invalid_argument);
}

TEST_CASE("channel construction matches the outer-product sum") {
  SUBCASE("single broadside path gives the all-ones matrix") {
    auto ch = build_channel({{Complex(1, 0), 0.0, 0.0}}, 2, 2);
    CHECK((ch.matrix - CMat::Ones(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("no paths gives the zero matrix") {
    auto ch = build_channel({}, 3, 3);
    CHECK(ch.matrix.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("random paths match independent elementwise evaluation") {
    Rng rng(42);
    for (int t = 0; t < 20; ++t) {
      std::vector<PathSpec> paths;
      for (int l = 0; l < 2; ++l) {
        paths.push_back({rng.circular_gaussian(), rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)});
      }
      auto ch = build_channel(paths, 5, 4);
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 5; ++c) {
          Complex want = 0;
          for (const auto& p : paths) {
            want += p.gain * std::polar(1.0, kPi * r * std::sin(p.aoa)) *
                    std::polar(1.0, kPi * c * std::sin(p.aod));
          }
          CHECK(std::abs(ch.matrix(r, c) - want) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("rician sampler honors the path structure") {
  ChannelSimConfig cfg;
  cfg.num_paths = 1;
  auto only_los = sample_rician_channel(cfg, 5);
  CHECK(only_los.paths.size() == 1);
  CHECK(only_los.paths[0].gain == Complex(1.0, 0.0));

  cfg.num_paths = 8;
  auto a = sample_rician_channel(cfg, 99);
  auto b = sample_rician_channel(cfg, 99);
  CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() == 0.0);
  auto c = sample_rician_channel(cfg, 100);
  CHECK((a.matrix - c.matrix).cwiseAbs().maxCoeff() > 0.0);

  ChannelSimConfig bad = cfg;
  bad.num_paths = 0;
  CHECK_THROWS_AS(sample_rician_channel(bad, 1), std::invalid_argument);
}

TEST_CASE("rician sampler hits the configured power ratio on average") {
  ChannelSimConfig cfg;
  cfg.tx_elements = 4;
  cfg.rx_elements = 4;
  double nlos_power = 0.0;
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) {
    auto ch = sample_rician_channel(cfg, 1000 + s);
    for (std::size_t l = 1; l < ch.paths.size(); ++l) nlos_power += std::norm(ch.paths[l].gain);
  }
  nlos_power /= seeds;
  CHECK(nlos_power == doctest::Approx(0.1).epsilon(0.03));
}

TEST_CASE("rician sampler keeps NLOS departures inside the spread window") {
  ChannelSimConfig cfg;
  cfg.los_aod = deg2rad(10.0);
  for (int s = 0; s < 50; ++s) {
    auto ch = sample_rician_channel(cfg, s);
    for (std::size_t l = 1; l < ch.paths.size(); ++l) {
      CHECK(std::abs(ch.paths[l].aod - cfg.los_aod) <= deg2rad(7.0) + 1e-12);
    }
  }
}

TEST_CASE("mrc weights") {
  CMat eye = CMat::Identity(2, 2);
  CVec w(2);
  w << Complex(1, 0), Complex(0, 0);
  CHECK(approx_diff(mrc_receive_weights(eye, w), w) < 1e-15);

  CMat jeye = Complex(0, 1) * CMat::Identity(2, 2);
  CVec ones = CVec::Ones(2);
  CVec want = Complex(0, -1) * CVec::Ones(2);
  CHECK(approx_diff(mrc_receive_weights(jeye, ones), want) < 1e-15);

  CHECK_THROWS_AS(mrc_receive_weights(eye, CVec::Ones(3)), std::invalid_argument);
}

TEST_CASE("mrc beats sampled unit combiners") {
  Rng rng(77);
  const CMat h = random_complex_matrix(rng, 4, 4);
  const CVec w = random_unit_vector(rng, 4);
  const CVec mrc = mrc_receive_weights(h, w);
  const CVec rx = h * w;
  const double best = std::norm((mrc / mrc.norm()).cwiseProduct(rx).sum());
  for (int t = 0; t < 1000; ++t) {
    const CVec u = random_unit_vector(rng, 4);
    CHECK(std::norm(u.cwiseProduct(rx).sum()) <= best + 1e-12);
  }
  CHECK(best == doctest::Approx((h * w).squaredNorm()).epsilon(1e-12));
}

TEST_CASE("received power") {
  CMat eye = CMat::Identity(3, 3);
  Rng rng(5);
  CHECK(received_power(eye, random_unit_vector(rng, 3)) == doctest::Approx(1.0));

  // Matched transmit filter on a single path concentrates M * M_r.
  auto ch = build_channel({{Complex(1, 0), 0.3, -0.2}}, 2, 2);
  const CVec wt = steering_vector(0.3, 2).conjugate() / std::sqrt(2.0);
  CHECK(received_power(ch.matrix, wt) == doctest::Approx(4.0).epsilon(1e-12));

  const CMat h = random_complex_matrix(rng, 4, 4);
  const CVec w = random_complex_vector(rng, 4);
  const Complex q = (h * w).dot(h * w);
  CHECK(received_power(h, w) == doctest::Approx(q.real() / w.squaredNorm()).epsilon(1e-12));

  CHECK_THROWS_AS(received_power(h, CVec::Zero(4)), std::invalid_argument);
}

TEST_CASE("received power is invariant to weight scaling") {
  Rng rng(6);
  const CMat h = random_complex_matrix(rng, 5, 5);
  const CVec w = random_complex_vector(rng, 5);
  const double base = received_power(h, w);
  for (int t = 0; t < 20; ++t) {
    const Complex c = 3.0 * rng.circular_gaussian() + Complex(0.01, 0);
    CHECK(received_power(h, c * w) == doctest::Approx(base).epsilon(1e-10));
  }
}

TEST_CASE("bf gain") {
  CHECK(bf_gain(0.0, CVec::Ones(16) / 4.0) == doctest::Approx(16.0));
  CVec cancel(2);
  cancel << Complex(1, 0), Complex(-1, 0);
  CHECK(bf_gain(0.0, cancel / std::sqrt(2.0)) == doctest::Approx(0.0));

  Rng rng(8);
  const CVec w = random_complex_vector(rng, 6);
  const double theta = rng.uniform(-1.2, 1.2);
  Complex sum = 0;
  for (int m = 0; m < 6; ++m) sum += w[m] * std::polar(1.0, kPi * m * std::sin(theta));
  CHECK(bf_gain(theta, w) == doctest::Approx(std::norm(sum) / w.squaredNorm()).epsilon(1e-12));

  CHECK_THROWS_AS(bf_gain(0.0, CVec::Zero(4)), std::invalid_argument);
}

TEST_CASE("angular power matrix structure") {
  const double left = deg2rad(-10.0), right = deg2rad(20.0);
  auto apm = angular_power_matrix(left, right, 64, 8);

  SUBCASE("hermitian and toeplitz") {
    CHECK((apm.matrix - apm.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    for (int m = 0; m + 1 < 8; ++m) {
      for (int n = 0; n + 1 < 8; ++n) {
        CHECK(std::abs(apm.matrix(m, n) - apm.matrix(m + 1, n + 1)) < 1e-14);
      }
    }
  }
  SUBCASE("diagonal equals the range width") {
    for (int m = 0; m < 8; ++m) {
      CHECK(std::abs(apm.matrix(m, m) - Complex(right - left, 0)) < 1e-12);
    }
  }
  SUBCASE("positive semidefinite") {
    Eigen::SelfAdjointEigenSolver<CMat> eig(apm.matrix);
    CHECK(eig.eigenvalues().minCoeff() > -1e-10);
  }
  SUBCASE("zero width range") {
    auto z = angular_power_matrix(0.25, 0.25, 16, 8);
    CHECK(z.matrix.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("reversed range rejected") {
    CHECK_THROWS_AS(angular_power_matrix(0.5, 0.2, 16, 8), std::invalid_argument);
  }
}

TEST_CASE("coarse integration stays within 1e-3 of the 4096-step reference") {
  const double width = deg2rad(8.59);
  const double left = deg2rad(5.01) - width / 2, right = left + width;
  const CMat ref = integration_reference(left, right, 16);
  auto coarse = angular_power_matrix(left, right, 16, 16);
  CHECK((coarse.matrix - ref).cwiseAbs().maxCoeff() < 1e-3);
  auto coarse12 = angular_power_matrix(left, right, 12, 16);
  CHECK((coarse12.matrix - ref).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("pattern evaluation") {
  CVec e1 = CVec::Zero(5);
  e1[0] = 1.0;
  std::vector<double> grid{-0.7, -0.1, 0.0, 0.4, 1.1};
  CHECK(approx_diff(pattern(e1, grid), CVec::Ones(5)) < 1e-15);

  std::vector<double> zero{0.0};
  CHECK(std::abs(pattern(CVec::Ones(7), zero)[0] - Complex(7, 0)) < 1e-14);

  Rng rng(9);
  const CVec w = random_complex_vector(rng, 6);
  const CVec pat = pattern(w, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::norm(pat[i]) / w.squaredNorm() ==
          doctest::Approx(bf_gain(grid[i], w)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(pattern(w, std::span<const double>{}), std::invalid_argument);
}

TEST_CASE("waveform mse") {
  std::vector<double> grid{-0.5, -0.2, 0.0, 0.3, 0.8};
  Rng rng(10);
  const CVec w = random_complex_vector(rng, 4);
  const CVec pat = pattern(w, grid);

  SUBCASE("proportional desired waveform gives zero mismatch") {
    DesiredPattern d;
    d.grid = grid;
    d.weights = RVec::Ones(5);
    d.magnitudes = 2.5 * pat.cwiseAbs();
    d.phases.resize(5);
    for (int i = 0; i < 5; ++i) d.phases[i] = std::polar(1.0, std::arg(pat[i]));
    CHECK(waveform_mse(w, d) < 1e-12);
  }

  SUBCASE("orthogonal desired waveform leaves the full pattern energy") {
    // Desired waveform supported where the pattern weight is zeroed by D.
    DesiredPattern d;
    d.grid = grid;
    d.weights = RVec::Ones(5);
    d.phases = CVec::Ones(5);
    d.magnitudes = RVec::Zero(5);
    // Build d_v orthogonal to pattern under the plain inner product:
    // rotate the pattern 90 degrees so Re{d_v^H g} = 0.
    d.magnitudes = pat.cwiseAbs();
    for (int i = 0; i < 5; ++i) d.phases[i] = std::polar(1.0, std::arg(pat[i]) + kPi / 2);
    CHECK(waveform_mse(w, d) == doctest::Approx(pat.squaredNorm()).epsilon(1e-12));
  }

  SUBCASE("random case matches the two-step evaluation") {
    DesiredPattern d;
    d.grid = grid;
    d.weights = RVec::Ones(5) + RVec::Random(5).cwiseAbs();
    d.magnitudes = RVec::Random(5).cwiseAbs();
    d.phases.resize(5);
    for (int i = 0; i < 5; ++i) d.phases[i] = std::polar(1.0, rng.uniform(-kPi, kPi));
    const CVec d_v = d.desired_waveform();
    const CVec dd = d.weights.cwiseProduct(d.weights).cast<Complex>();
    const double c =
        (d_v.conjugate().cwiseProduct(dd).cwiseProduct(pat)).sum().real() / d_v.squaredNorm();
    const double want = (d.weights.cast<Complex>().cwiseProduct(pat - c * d_v)).squaredNorm();
    CHECK(waveform_mse(w, d) == doctest::Approx(want).epsilon(1e-12));
  }
}
