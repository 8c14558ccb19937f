#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace jcasbeam {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random stream. Gaussian draws use an explicit Box-Muller
// transform so the sequence does not depend on the standard library's
// unspecified normal_distribution algorithm.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Independent stream for one Monte Carlo trial; mixing keeps streams
  // decorrelated for adjacent trial indices.
  static Rng for_trial(std::uint64_t seed, std::uint64_t trial) {
    std::uint64_t s = seed ^ (0xd1342543de82ef95ULL * (trial + 1));
    std::uint64_t mixed = splitmix64(s);
    return Rng(splitmix64(mixed) ^ mixed);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

  /// Circularly symmetric complex Gaussian with E|z|^2 = 1.
  std::complex<double> circular_gaussian() {
    const double s = std::sqrt(0.5);
    double re = gaussian();
    double im = gaussian();
    return {s * re, s * im};
  }

  std::uint64_t raw() { return gen_(); }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace jcasbeam
