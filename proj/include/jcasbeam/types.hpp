#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>

namespace jcasbeam {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kJ{0.0, 1.0};

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle to the canonical window [-pi, pi).
inline double wrap_angle(double phi) {
  double w = std::remainder(phi, 2.0 * kPi);
  if (w >= kPi) w -= 2.0 * kPi;
  if (w < -kPi) w += 2.0 * kPi;
  return w;
}

}  // namespace jcasbeam
