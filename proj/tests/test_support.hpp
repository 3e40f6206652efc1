#pragma once

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "ringwalk/walk_config.hpp"

namespace ringwalk::testing {

/// Independent matrix-exponential oracle: scaling-and-squaring with a
/// truncated Taylor series. Deliberately ignorant of the ring's spectral
/// structure so it can cross-check the spectrally assembled propagator.
inline ComplexMatrix expm_oracle(const ComplexMatrix& a) {
  const int n = static_cast<int>(a.rows());
  int squarings = 0;
  double scale = a.cwiseAbs().maxCoeff() * n;
  while (scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  const ComplexMatrix b = a / std::pow(2.0, squarings);
  ComplexMatrix term = ComplexMatrix::Identity(n, n);
  ComplexMatrix sum = term;
  for (int k = 1; k <= 24; ++k) {
    term = (term * b) / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// Deterministic stream of valid walk configurations for property tests.
class ConfigSampler {
 public:
  explicit ConfigSampler(unsigned seed, int max_sites = 25)
      : rng_(seed), max_sites_(max_sites) {}

  WalkConfig next() {
    std::uniform_int_distribution<int> sites(4, max_sites_);
    const int n = sites(rng_);
    std::uniform_int_distribution<int> target(1, n - 1);
    std::uniform_real_distribution<double> phase(-M_PI / n, M_PI / n);
    std::uniform_real_distribution<double> period(0.05, 3.0);
    WalkConfig config;
    config.num_sites = n;
    config.target = target(rng_);
    config.phi = phase(rng_);
    config.tau = period(rng_);
    config.total_time = 600.0; // generous: property tests pick their own n
    return config;
  }

 private:
  std::mt19937 rng_;
  int max_sites_;
};

} // namespace ringwalk::testing
