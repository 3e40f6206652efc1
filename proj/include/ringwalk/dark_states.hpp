#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ringwalk/perron_frobenius.hpp"
#include "ringwalk/ring_model.hpp"
#include "ringwalk/walk_config.hpp"

namespace ringwalk {

/// Pairs (m, n), m < n, of ring eigenlevels whose eigenvalues coincide within
/// `tol`. Such pairs support detector-dark superpositions at every detection
/// period. Nonempty only on the degeneracy set of the phase (phi = 0 and, for
/// even rings, phi = ±pi/N within the principal window).
inline std::vector<std::pair<int, int>> degenerate_pairs(int num_sites, double phi,
                                                         double tol = 1e-9) {
  const Spectrum s = analytic_spectrum(num_sites, phi);
  std::vector<std::pair<int, int>> pairs;
  for (int m = 0; m < num_sites; ++m)
    for (int n = m + 1; n < num_sites; ++n)
      if (std::abs(s.eigenvalues[m] - s.eigenvalues[n]) < tol)
        pairs.emplace_back(m, n);
  return pairs;
}

/// Detection period at which the split pair (m, n) accumulates a relative
/// phase of 2 pi k over one cycle and becomes dark:
///   tau = k pi / (2 sin(pi (m - n) / N) sin(phi - pi (m + n) / N)).
/// The sign of the result follows the formula; only positive values are
/// physical detection periods, negative ones mean this k counts the phase in
/// the opposite sense for this pair.
inline double phase_matching_tau(int num_sites, double phi, int m, int n, int k) {
  if (num_sites < 3)
    throw std::invalid_argument("phase_matching_tau: need at least 3 sites");
  if (m == n)
    throw std::invalid_argument("phase_matching_tau: levels must differ, got m = n = " +
                                std::to_string(m));
  if (k == 0)
    throw std::invalid_argument("phase_matching_tau: k must be a nonzero integer");
  const double denom = 2.0 * std::sin(M_PI * (m - n) / num_sites) *
                       std::sin(phi - M_PI * (m + n) / num_sites);
  if (std::abs(denom) < 1e-12)
    throw std::invalid_argument(
        "phase_matching_tau: pair (" + std::to_string(m) + ", " + std::to_string(n) +
        ") is degenerate at phi = " + std::to_string(phi) +
        "; it is dark at every period, no matching time exists");
  return k * M_PI / denom;
}

/// A single-excitation state with no amplitude at the detector site that the
/// monitored cycle merely rephases: O |vector> = pf_eigenvalue |vector| with
/// |pf_eigenvalue| = 1. Built from a pair of ring eigenlevels that are either
/// exactly degenerate or phase-matched at the configured detection period.
struct DarkState {
  enum class Origin { DegeneratePair, PhaseMatched };

  StateVector vector;
  Origin origin = Origin::DegeneratePair;
  int level_m = 0;
  int level_n = 0;
  int winding = 0; // k of the phase-matching condition; 0 for degenerate pairs
  Complex pf_eigenvalue{1.0, 0.0}; // e^{-i lambda_m tau}

  const char* origin_name() const {
    return origin == Origin::DegeneratePair ? "degenerate" : "phase_matched";
  }
};

namespace detail {

/// Fix the arbitrary global phase: rotate so the overlap with site 0 is real
/// and positive; if that overlap vanishes, use the first significant
/// component instead. Keeps reported overlaps and reconstructions such as
/// sum_j <0|gamma_j> |gamma_j> free of solver-dependent phase factors.
inline void canonicalize_phase(StateVector& v) {
  int pivot = 0;
  if (std::abs(v[0]) <= 1e-12) {
    pivot = -1;
    for (int i = 0; i < v.size(); ++i)
      if (std::abs(v[i]) > 1e-8) {
        pivot = i;
        break;
      }
    if (pivot < 0) return;
  }
  v *= std::conj(v[pivot]) / std::abs(v[pivot]);
}

/// Nearest winding number k for which the configured period phase-matches the
/// level pair, or 0 when no k comes within `tol` (absolute tolerance on tau).
inline int matched_winding(double tau, double lambda_m, double lambda_n, double tol) {
  const double dl = lambda_m - lambda_n;
  const double k_real = tau * dl / (2.0 * M_PI);
  const int k = static_cast<int>(std::lround(k_real));
  if (k == 0) return 0;
  const double tau_k = 2.0 * M_PI * k / dl;
  return std::abs(tau - tau_k) <= tol ? k : 0;
}

} // namespace detail

/// Dark superposition of levels (m, n) for the given configuration:
///   sqrt(N/2) ( <delta|lambda_n> |lambda_m> - <delta|lambda_m> |lambda_n> ),
/// rephased canonically. Throws when the pair is neither degenerate nor
/// phase-matched at config.tau (within 1e-9 on the period), i.e. when no such
/// dark state exists.
inline DarkState dark_state_from_pair(const WalkConfig& config, int m, int n) {
  config.validate();
  const int num_sites = config.num_sites;
  if (m < 0 || m >= num_sites || n < 0 || n >= num_sites || m == n)
    throw std::invalid_argument("dark_state_from_pair: invalid level pair (" +
                                std::to_string(m) + ", " + std::to_string(n) + ")");

  const Spectrum s = analytic_spectrum(num_sites, config.phi);
  DarkState state;
  state.level_m = m;
  state.level_n = n;

  const double gap = std::abs(s.eigenvalues[m] - s.eigenvalues[n]);
  if (gap < config.tol_degenerate) {
    state.origin = DarkState::Origin::DegeneratePair;
    state.winding = 0;
  } else {
    const int k =
        detail::matched_winding(config.tau, s.eigenvalues[m], s.eigenvalues[n], 1e-9);
    if (k == 0)
      throw computation_error(
          "dark_state_from_pair: pair (" + std::to_string(m) + ", " +
          std::to_string(n) + ") is neither degenerate nor phase-matched at tau = " +
          std::to_string(config.tau) + "; not dark");
    state.origin = DarkState::Origin::PhaseMatched;
    state.winding = k;
  }

  const double scale = std::sqrt(num_sites / 2.0);
  state.vector = scale * (s.eigenvectors(config.target, n) * s.eigenvectors.col(m) -
                          s.eigenvectors(config.target, m) * s.eigenvectors.col(n));
  detail::canonicalize_phase(state.vector);
  state.pf_eigenvalue = std::exp(Complex(0.0, -s.eigenvalues[m] * config.tau));
  return state;
}

/// Every dark state of a configuration: the degenerate-pair states plus the
/// phase-matched ones whose matching period equals config.tau, orthonormalised
/// into a basis (linearly dependent candidates are dropped). `initial_overlap`
/// is the weight of the start state |0> inside the dark subspace and bounds
/// the detection probability: pdet_infinity = 1 - initial_overlap.
struct DarkReport {
  WalkConfig config;
  std::vector<DarkState> dark_basis;
  double initial_overlap = 0.0;
  double pdet_infinity = 1.0;
};

inline DarkReport dark_report(const WalkConfig& config) {
  config.validate();
  DarkReport report;
  report.config = config;

  const Spectrum s = analytic_spectrum(config.num_sites, config.phi);
  std::vector<DarkState> candidates;
  for (int m = 0; m < config.num_sites; ++m)
    for (int n = m + 1; n < config.num_sites; ++n) {
      const double gap = std::abs(s.eigenvalues[m] - s.eigenvalues[n]);
      if (gap < config.tol_degenerate ||
          detail::matched_winding(config.tau, s.eigenvalues[m], s.eigenvalues[n],
                                  1e-9) != 0)
        candidates.push_back(dark_state_from_pair(config, m, n));
    }

  // Orthonormalise in collection order, dropping candidates that add nothing.
  for (auto& candidate : candidates) {
    StateVector v = candidate.vector;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& kept : report.dark_basis)
        v -= kept.vector.dot(v) * kept.vector;
    const double norm = v.norm();
    if (norm < 1e-8) continue;
    candidate.vector = v / norm;
    detail::canonicalize_phase(candidate.vector);
    report.dark_basis.push_back(std::move(candidate));
  }

  double overlap = 0.0;
  for (const auto& state : report.dark_basis)
    overlap += std::norm(state.vector[0]);
  report.initial_overlap = overlap;
  report.pdet_infinity = 1.0 - overlap;
  return report;
}

/// Number of phases in [phi_lo, phi_hi] at which some level pair (m < n) is
/// phase-matched with winding |k| <= k_max at the given period, counted with
/// multiplicity over (pair, k, root). Roots solve
///   2 tau sin(pi (m - n)/N) sin(phi - pi (m + n)/N) = k pi
/// in closed form via arcsine, so the count is exact up to roots that only
/// touch (|sin| = 1 tangencies), which coincident branches reduce to one.
inline int dark_state_count_in_window(int num_sites, double phi_lo, double phi_hi,
                                      double tau, int k_max) {
  if (num_sites < 3)
    throw std::invalid_argument("dark_state_count_in_window: need at least 3 sites");
  if (!(tau > 0.0))
    throw std::invalid_argument("dark_state_count_in_window: tau must be positive");
  if (phi_hi < phi_lo)
    throw std::invalid_argument("dark_state_count_in_window: empty phase window");
  if (k_max < 1)
    throw std::invalid_argument("dark_state_count_in_window: k_max must be >= 1");

  const double two_pi = 2.0 * M_PI;
  int count = 0;
  std::vector<double> roots;
  for (int m = 0; m < num_sites; ++m)
    for (int n = m + 1; n < num_sites; ++n) {
      const double amplitude = 2.0 * tau * std::sin(M_PI * (m - n) / num_sites);
      if (std::abs(amplitude) < 1e-15) continue;
      const double center = M_PI * (m + n) / num_sites;
      for (int k = -k_max; k <= k_max; ++k) {
        if (k == 0) continue;
        const double ratio = k * M_PI / amplitude;
        if (std::abs(ratio) > 1.0) continue;
        const double arc = std::asin(ratio);
        roots.clear();
        for (const double base : {center + arc, center + M_PI - arc}) {
          const int l_lo = static_cast<int>(std::ceil((phi_lo - base) / two_pi - 1e-12));
          const int l_hi = static_cast<int>(std::floor((phi_hi - base) / two_pi + 1e-12));
          for (int l = l_lo; l <= l_hi; ++l) {
            const double phi = base + two_pi * l;
            if (phi < phi_lo - 1e-12 || phi > phi_hi + 1e-12) continue;
            bool duplicate = false;
            for (const double seen : roots)
              if (std::abs(seen - phi) < 1e-12) {
                duplicate = true;
                break;
              }
            if (!duplicate) roots.push_back(phi);
          }
        }
        count += static_cast<int>(roots.size());
      }
    }
  return count;
}

/// Default winding cutoff that covers every solvable |k| at the given period:
/// |2 tau sin sin| <= 2 tau, so windings beyond 2 tau / pi have no roots.
inline int default_winding_cutoff(double tau) {
  return static_cast<int>(std::ceil(2.0 * tau / M_PI)) + 1;
}

} // namespace ringwalk
