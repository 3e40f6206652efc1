#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ringwalk/ring_model.hpp"
#include "ringwalk/walk_config.hpp"

namespace ringwalk {

/// One cycle of the stroboscopic detection protocol: evolve the (generally
/// unnormalised) state for one period, read off the detection probability at
/// the target site, and project onto "not detected" by zeroing that
/// amplitude. Returns the probability that this attempt fired.
inline double monitored_step(StateVector& state, const ComplexMatrix& u_tau,
                             int target) {
  state = u_tau * state;
  const double fired = std::norm(state[target]);
  state[target] = Complex(0.0, 0.0);
  return fired;
}

/// Detection record of a full monitored run started from site 0:
/// first_detection[m-1] is the probability that the walker is caught exactly
/// at the m-th attempt, cumulative[m-1] the probability it has been caught by
/// then, and survival[m-1] the squared norm of the surviving state.
struct DetectionRecord {
  WalkConfig config;
  std::vector<double> first_detection;
  std::vector<double> cumulative;
  std::vector<double> survival;

  std::size_t attempts() const { return first_detection.size(); }
};

inline DetectionRecord first_detection_series(const WalkConfig& config,
                                              std::size_t n_attempts) {
  config.validate();
  DetectionRecord record;
  record.config = config;
  record.first_detection.reserve(n_attempts);
  record.cumulative.reserve(n_attempts);
  record.survival.reserve(n_attempts);

  const ComplexMatrix u_tau = propagator(config.num_sites, config.phi, config.tau);
  StateVector state = StateVector::Zero(config.num_sites);
  state[0] = Complex(1.0, 0.0);

  // Kahan-compensated running sum: the cumulative detection probability is
  // compared against 1 - survival at the 1e-12 level over ~1e4 attempts, so
  // naive accumulation would dominate the error budget.
  double sum = 0.0, comp = 0.0;
  for (std::size_t m = 0; m < n_attempts; ++m) {
    const double fired = monitored_step(state, u_tau, config.target);
    const double y = fired - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    record.first_detection.push_back(fired);
    record.cumulative.push_back(sum);
    record.survival.push_back(state.squaredNorm());
  }
  return record;
}

/// Run the protocol for as many attempts as fit into the observation budget.
inline DetectionRecord first_detection_series(const WalkConfig& config) {
  return first_detection_series(config, config.max_attempts());
}

/// Total detection probability accumulated over the observation budget.
inline double detection_probability_at_budget(const WalkConfig& config) {
  const DetectionRecord record = first_detection_series(config);
  return record.cumulative.empty() ? 0.0 : record.cumulative.back();
}

} // namespace ringwalk
