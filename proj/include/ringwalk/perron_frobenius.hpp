#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ringwalk/monitored.hpp"
#include "ringwalk/ring_model.hpp"
#include "ringwalk/walk_config.hpp"

namespace ringwalk {

/// One-cycle transfer operator of the monitored walk: evolve for one period,
/// then project out the target site. Equals U(tau) with row `target` zeroed.
/// Not normal, so its eigenvectors are in general non-orthogonal.
inline ComplexMatrix build_pf_operator(const WalkConfig& config) {
  config.validate();
  ComplexMatrix op = propagator(config.num_sites, config.phi, config.tau);
  op.row(config.target).setZero();
  return op;
}

/// Eigensystem of the one-cycle transfer operator, sorted by descending
/// eigenvalue modulus. `overlaps[j]` is |<mu_j|psi_0>|^2 with the start state
/// |0>; eigenvalues closer than tol_degenerate are treated as one cluster and
/// their eigenvectors orthonormalised first, so the overlaps do not depend on
/// the arbitrary basis the solver picks inside a degenerate subspace.
struct PFSpectrum {
  WalkConfig config;
  Eigen::VectorXcd eigenvalues;     // descending |mu|
  ComplexMatrix right_eigenvectors; // unit-norm columns, same order
  Eigen::VectorXd overlaps;         // |<mu_j|0>|^2
  double leading_modulus = 0.0;     // |mu_0|
  double subleading_modulus = 0.0;  // largest |mu| strictly inside the unit circle
};

namespace detail {

/// Modified Gram-Schmidt with one re-orthogonalisation pass; columns whose
/// residual drops below `drop_tol` are removed. Returns the surviving count.
inline int orthonormalize_columns(ComplexMatrix& basis, double drop_tol = 1e-8) {
  int kept = 0;
  for (int j = 0; j < basis.cols(); ++j) {
    StateVector v = basis.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < kept; ++i)
        v -= basis.col(i).dot(v) * basis.col(i);
    const double norm = v.norm();
    if (norm < drop_tol) continue;
    basis.col(kept) = v / norm;
    ++kept;
  }
  basis.conservativeResize(Eigen::NoChange, kept);
  return kept;
}

} // namespace detail

inline PFSpectrum pf_spectrum(const WalkConfig& config) {
  const ComplexMatrix op = build_pf_operator(config);
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(op, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw computation_error("pf_spectrum: eigensolver failed for " + config.describe());

  const int n = config.num_sites;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXcd& raw = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&raw](int a, int b) {
    const double ma = std::abs(raw[a]), mb = std::abs(raw[b]);
    if (ma != mb) return ma > mb;
    if (raw[a].real() != raw[b].real()) return raw[a].real() > raw[b].real();
    return raw[a].imag() > raw[b].imag();
  });

  PFSpectrum spectrum;
  spectrum.config = config;
  spectrum.eigenvalues.resize(n);
  spectrum.right_eigenvectors.resize(n, n);
  for (int j = 0; j < n; ++j) {
    spectrum.eigenvalues[j] = raw[order[j]];
    spectrum.right_eigenvectors.col(j) = solver.eigenvectors().col(order[j]);
    spectrum.right_eigenvectors.col(j).normalize();
  }

  // Orthonormalise within eigenvalue clusters before taking overlaps.
  spectrum.overlaps.resize(n);
  int lo = 0;
  while (lo < n) {
    int hi = lo + 1;
    while (hi < n && std::abs(spectrum.eigenvalues[hi] - spectrum.eigenvalues[lo]) <=
                         config.tol_degenerate)
      ++hi;
    if (hi - lo > 1) {
      ComplexMatrix block = spectrum.right_eigenvectors.middleCols(lo, hi - lo);
      const int kept = detail::orthonormalize_columns(block);
      for (int j = 0; j < hi - lo; ++j)
        spectrum.right_eigenvectors.col(lo + j) =
            j < kept ? StateVector(block.col(j)) : StateVector(StateVector::Zero(n));
    }
    lo = hi;
  }
  for (int j = 0; j < n; ++j)
    spectrum.overlaps[j] = std::norm(spectrum.right_eigenvectors.col(j)[0]);

  spectrum.leading_modulus = std::abs(spectrum.eigenvalues[0]);
  spectrum.subleading_modulus = 0.0;
  for (int j = 0; j < n; ++j) {
    const double m = std::abs(spectrum.eigenvalues[j]);
    if (m < 1.0 - config.tol_unit) {
      spectrum.subleading_modulus = m;
      break;
    }
  }
  return spectrum;
}

/// Spectral gap of the monitored cycle and the relaxation scale 1/gap, in
/// units of the detection period. When every unit-modulus mode is known to
/// carry zero weight in the initial state (`ignore_unit_modes`), the gap is
/// taken from the largest strictly-contracting modulus instead, since those
/// frozen modes never influence the decay actually observed.
struct AsymptoticScale {
  double gap = 0.0;
  double t_asymptotic = std::numeric_limits<double>::infinity();
  bool diverged = false; // gap below tol_unit: no finite relaxation scale
};

inline AsymptoticScale asymptotic_scale(const PFSpectrum& spectrum,
                                        bool ignore_unit_modes) {
  const double modulus =
      ignore_unit_modes ? spectrum.subleading_modulus : spectrum.leading_modulus;
  AsymptoticScale scale;
  scale.gap = 1.0 - modulus;
  if (scale.gap < spectrum.config.tol_unit) {
    scale.diverged = true;
    scale.t_asymptotic = std::numeric_limits<double>::infinity();
  } else {
    scale.t_asymptotic = 1.0 / scale.gap;
  }
  return scale;
}

inline AsymptoticScale asymptotic_scale(const WalkConfig& config,
                                        bool ignore_unit_modes) {
  return asymptotic_scale(pf_spectrum(config), ignore_unit_modes);
}

/// Survival probability after n cycles, computed two ways: the spectral
/// estimate sum_j |mu_j|^{2n} |<mu_j|0>|^2 over unit-norm eigenvectors, and
/// the exact value from iterating the protocol. Because the transfer operator
/// is not normal its eigenvectors are not orthogonal, so the estimate is not
/// exact even at n = 0; `deviation` reports the gap and should accompany any
/// use of the estimate.
struct SurvivalEstimate {
  double spectral = 0.0;
  double iterated = 0.0;
  double deviation = 0.0; // |spectral - iterated|
};

inline SurvivalEstimate survival_spectral_estimate(const PFSpectrum& spectrum,
                                                   std::size_t n_cycles) {
  SurvivalEstimate result;
  for (int j = 0; j < spectrum.eigenvalues.size(); ++j)
    result.spectral += std::pow(std::abs(spectrum.eigenvalues[j]),
                                2.0 * static_cast<double>(n_cycles)) *
                       spectrum.overlaps[j];

  if (n_cycles == 0) {
    result.iterated = 1.0;
  } else {
    const DetectionRecord record =
        first_detection_series(spectrum.config, n_cycles);
    result.iterated = record.survival.back();
  }
  result.deviation = std::abs(result.spectral - result.iterated);
  return result;
}

inline SurvivalEstimate survival_spectral_estimate(const WalkConfig& config,
                                                   std::size_t n_cycles) {
  return survival_spectral_estimate(pf_spectrum(config), n_cycles);
}

} // namespace ringwalk
