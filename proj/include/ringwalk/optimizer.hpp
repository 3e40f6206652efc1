#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ringwalk/dark_states.hpp"
#include "ringwalk/monitored.hpp"
#include "ringwalk/parallel.hpp"
#include "ringwalk/perron_frobenius.hpp"
#include "ringwalk/walk_config.hpp"

namespace ringwalk {

/// Uniform grid over a closed interval, endpoints included.
struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;

  std::vector<double> values() const {
    if (count < 1)
      throw config_error("grid: need at least one point, got count=" +
                         std::to_string(count));
    if (count > 1 && !(hi > lo))
      throw config_error("grid: upper bound must exceed lower bound for count > 1");
    std::vector<double> v(count);
    if (count == 1) {
      v[0] = lo;
    } else {
      const double step = (hi - lo) / (count - 1);
      for (int i = 0; i < count; ++i) v[i] = lo + step * i;
    }
    return v;
  }

  double step() const { return count > 1 ? (hi - lo) / (count - 1) : 0.0; }
};

/// Default protocol-parameter grids: 101 phases across the principal window
/// [-pi/N, pi/N] (so 0 and +-pi/2N are grid points), 150 periods from 0.02 to
/// 3.00 in steps of 0.02.
inline GridSpec default_phi_grid(int num_sites) {
  return {-M_PI / num_sites, M_PI / num_sites, 101};
}
inline GridSpec default_tau_grid() { return {0.02, 3.0, 150}; }

/// Detection probability and leading cycle-mode modulus on a (phi, tau) grid
/// at a fixed observation budget. pdet(i, j) and pf_moduli(i, j) belong to
/// (phi_values[i], tau_values[j]); attempts[j] = floor(total_time /
/// tau_values[j]). Cells are computed by a worker pool but written into
/// preassigned slots, so the result is identical for any worker count.
struct SweepResult {
  int num_sites = 0;
  int target = 0;
  double total_time = 0.0;
  std::vector<double> phi_values;
  std::vector<double> tau_values;
  std::vector<std::size_t> attempts;
  Eigen::MatrixXd pdet;
  Eigen::MatrixXd pf_moduli;
};

inline SweepResult sweep(int num_sites, int target, double total_time,
                         const GridSpec& phi_grid, const GridSpec& tau_grid,
                         int workers = 0) {
  SweepResult result;
  result.num_sites = num_sites;
  result.target = target;
  result.total_time = total_time;
  result.phi_values = phi_grid.values();
  result.tau_values = tau_grid.values();

  result.attempts.resize(result.tau_values.size());
  for (std::size_t j = 0; j < result.tau_values.size(); ++j) {
    WalkConfig probe{num_sites, target, 0.0, result.tau_values[j], total_time};
    result.attempts[j] = probe.max_attempts();
  }

  const std::size_t n_phi = result.phi_values.size();
  const std::size_t n_tau = result.tau_values.size();
  result.pdet.resize(n_phi, n_tau);
  result.pf_moduli.resize(n_phi, n_tau);
  parallel_for(n_phi * n_tau, workers, [&](std::size_t cell) {
    const std::size_t i = cell / n_tau;
    const std::size_t j = cell % n_tau;
    WalkConfig config{num_sites, target, result.phi_values[i],
                      result.tau_values[j], total_time};
    result.pdet(i, j) = detection_probability_at_budget(config);
    result.pf_moduli(i, j) = pf_spectrum(config).leading_modulus;
  });
  return result;
}

namespace detail {

/// Modulus of the slowest monitored-cycle mode that actually decays. On the
/// degeneracy set of the phase the leading modes are frozen at modulus one,
/// so the relevant scale is the subleading modulus; elsewhere it is the
/// leading one.
inline double relevant_modulus(const WalkConfig& config, bool degenerate_phase) {
  const PFSpectrum spectrum = pf_spectrum(config);
  return degenerate_phase ? spectrum.subleading_modulus : spectrum.leading_modulus;
}

/// Golden-section search for the minimum of fn on [lo, hi] (unimodal
/// assumption); returns the abscissa.
template <typename Fn>
double golden_minimize(Fn&& fn, double lo, double hi, double tol = 1e-7) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  return 0.5 * (a + b);
}

} // namespace detail

/// Shortest physical period at which any level pair phase-matches, found two
/// ways: `analytic` minimises the closed-form matching period over all pairs
/// with winding +-1 (larger windings only lengthen the period), `empirical`
/// scans the slowest-mode modulus over a period grid and reports where it
/// first returns to within `onset_threshold` of one after the first local
/// minimum. Below this period no dark state interferes with detection.
struct TauStarResult {
  double analytic = std::numeric_limits<double>::infinity();
  int level_m = -1;
  int level_n = -1;
  int winding = 0;
  double empirical = std::numeric_limits<double>::quiet_NaN();
  bool disagree = true; // |analytic - empirical| > 0.05 (or empirical not found)
};

struct EmpiricalScan {
  double tau_lo = 0.3;
  double tau_hi = 2.5;
  double step = 0.002;
  double onset_threshold = 1e-3;
};

inline double tau_star_analytic(int num_sites, double phi, int* witness_m = nullptr,
                                int* witness_n = nullptr, int* witness_k = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  for (int m = 0; m < num_sites; ++m)
    for (int n = m + 1; n < num_sites; ++n)
      for (const int k : {-1, 1}) {
        double tau;
        try {
          tau = phase_matching_tau(num_sites, phi, m, n, k);
        } catch (const std::invalid_argument&) {
          break; // degenerate pair: dark at every period, no matching time
        }
        if (tau > 0.0 && tau < best) {
          best = tau;
          if (witness_m) *witness_m = m;
          if (witness_n) *witness_n = n;
          if (witness_k) *witness_k = k;
        }
      }
  return best;
}

inline TauStarResult tau_star(int num_sites, double phi, int target,
                              const EmpiricalScan& scan = {}) {
  TauStarResult result;
  result.analytic =
      tau_star_analytic(num_sites, phi, &result.level_m, &result.level_n,
                        &result.winding);

  const bool degenerate_phase = !degenerate_pairs(num_sites, phi).empty();
  const int n_steps =
      static_cast<int>(std::floor((scan.tau_hi - scan.tau_lo) / scan.step)) + 1;
  std::vector<double> taus(n_steps), mods(n_steps);
  for (int i = 0; i < n_steps; ++i) taus[i] = scan.tau_lo + i * scan.step;
  parallel_for(n_steps, 0, [&](std::size_t i) {
    WalkConfig config{num_sites, target, phi, taus[i], 1.0};
    mods[i] = detail::relevant_modulus(config, degenerate_phase);
  });

  // Anchor at the first local minimum of the modulus curve, then report the
  // first period after it where the slowest mode is back at the unit circle
  // within the onset threshold. Anchoring this way skips the fast small-tau
  // oscillations, which dip low repeatedly before the smooth trough.
  int anchor = -1;
  for (int i = 1; i + 1 < n_steps; ++i)
    if (mods[i] <= mods[i - 1] && mods[i + 1] > mods[i] + 1e-9) {
      anchor = i;
      break;
    }
  if (anchor >= 0) {
    for (int i = anchor + 1; i < n_steps; ++i)
      if (mods[i] >= 1.0 - scan.onset_threshold) {
        result.empirical = taus[i];
        break;
      }
  }
  result.disagree = !(std::abs(result.analytic - result.empirical) <= 0.05);
  return result;
}

/// Best protocol parameters on a budgeted grid. The search space is
/// restricted to periods below the analytic phase-matching bound of each
/// phase column; the winning period is then refined by golden-section search
/// inside its grid bracket (still capped below the bound). tau_pf is the
/// period minimising the slowest-mode modulus at the optimal phase — the
/// spectral proxy for the optimum, reported for comparison.
struct Optimum {
  double phi_opt = 0.0;
  double tau_opt = 0.0;
  double pdet = 0.0;
  double tau_star_analytic = 0.0;
  double tau_star_empirical = 0.0;
  double tau_pf = 0.0;
  double mirror_phi = 0.0; // reflected optimum: same pdet with the mirror target
  int mirror_target = 0;
};

inline Optimum optimize(int num_sites, int target, double total_time,
                        const GridSpec& phi_grid, const GridSpec& tau_grid,
                        int workers = 0) {
  const SweepResult grid = sweep(num_sites, target, total_time, phi_grid, tau_grid,
                                 workers);
  const std::size_t n_phi = grid.phi_values.size();
  const std::size_t n_tau = grid.tau_values.size();

  std::vector<double> bound(n_phi);
  for (std::size_t i = 0; i < n_phi; ++i)
    bound[i] = tau_star_analytic(num_sites, grid.phi_values[i]);

  std::size_t best_i = 0, best_j = 0;
  double best = -1.0;
  bool found = false;
  for (std::size_t i = 0; i < n_phi; ++i)
    for (std::size_t j = 0; j < n_tau; ++j) {
      if (grid.tau_values[j] >= bound[i]) continue;
      if (grid.pdet(i, j) > best) {
        best = grid.pdet(i, j);
        best_i = i;
        best_j = j;
        found = true;
      }
    }
  if (!found)
    throw computation_error(
        "optimize: no grid cell lies below the phase-matching bound; "
        "extend the period grid downward");

  Optimum opt;
  opt.phi_opt = grid.phi_values[best_i];
  opt.mirror_phi = -opt.phi_opt;
  opt.mirror_target = num_sites - target;

  const TauStarResult star = tau_star(num_sites, opt.phi_opt, target);
  opt.tau_star_analytic = star.analytic;
  opt.tau_star_empirical = star.empirical;

  const double cap = std::isfinite(star.analytic) ? star.analytic - 1e-9
                                                  : grid.tau_values.back();
  const double lo = best_j > 0 ? grid.tau_values[best_j - 1] : grid.tau_values[0];
  const double hi =
      std::min(best_j + 1 < n_tau ? grid.tau_values[best_j + 1] : cap, cap);
  auto negated_pdet = [&](double tau) {
    WalkConfig config{num_sites, target, opt.phi_opt, tau, total_time};
    return -detection_probability_at_budget(config);
  };
  opt.tau_opt = grid.tau_values[best_j];
  opt.pdet = best;
  if (hi > lo) {
    const double refined = detail::golden_minimize(negated_pdet, lo, hi, 1e-6);
    const double refined_pdet = -negated_pdet(refined);
    if (refined_pdet > opt.pdet) {
      opt.tau_opt = refined;
      opt.pdet = refined_pdet;
    }
  }

  // Spectral proxy: minimise the slowest decaying modulus over the allowed
  // periods at the optimal phase.
  const bool degenerate_phase = !degenerate_pairs(num_sites, opt.phi_opt).empty();
  const double scan_lo = 0.3;
  const double scan_step = 0.002;
  const int scan_n =
      std::max(2, static_cast<int>(std::floor((cap - scan_lo) / scan_step)) + 1);
  std::vector<double> mods(scan_n);
  parallel_for(scan_n, workers, [&](std::size_t i) {
    WalkConfig config{num_sites, target, opt.phi_opt, scan_lo + i * scan_step, 1.0};
    mods[i] = detail::relevant_modulus(config, degenerate_phase);
  });
  int arg = 0;
  for (int i = 1; i < scan_n; ++i)
    if (mods[i] < mods[arg]) arg = i;
  auto modulus_at = [&](double tau) {
    WalkConfig config{num_sites, target, opt.phi_opt, tau, 1.0};
    return detail::relevant_modulus(config, degenerate_phase);
  };
  const double pf_lo = scan_lo + std::max(0, arg - 1) * scan_step;
  const double pf_hi = std::min(scan_lo + (arg + 1) * scan_step, cap);
  opt.tau_pf = pf_hi > pf_lo ? detail::golden_minimize(modulus_at, pf_lo, pf_hi, 1e-7)
                             : scan_lo + arg * scan_step;
  return opt;
}

/// Relaxation scale of the monitored cycle as a function of the period, at a
/// fixed phase. Rows are (tau, gap, t_asymptotic); on the degeneracy set the
/// gap is measured from the subleading modulus (see asymptotic_scale).
struct TasCurvePoint {
  double tau = 0.0;
  double gap = 0.0;
  double t_asymptotic = 0.0;
};

inline std::vector<TasCurvePoint> tas_vs_tau(int num_sites, int target, double phi,
                                             const std::vector<double>& taus,
                                             int workers = 0) {
  const bool degenerate_phase = !degenerate_pairs(num_sites, phi).empty();
  std::vector<TasCurvePoint> curve(taus.size());
  parallel_for(taus.size(), workers, [&](std::size_t i) {
    WalkConfig config{num_sites, target, phi, taus[i], 1.0};
    const AsymptoticScale scale =
        asymptotic_scale(pf_spectrum(config), degenerate_phase);
    curve[i] = {taus[i], scale.gap, scale.t_asymptotic};
  });
  return curve;
}

/// Detection probability at the per-size optimal protocol across ring sizes
/// and observation budgets. For each size the phase is the symmetry optimum
/// (pi/2N for odd rings at target (N-1)/2, 0 for even rings at target N/2)
/// and the period is the spectral proxy tau_pf at that phase; each budget
/// then gets its own monitored run. `saturation_budget[i]` is the smallest
/// listed budget whose detection probability reaches 99% of the dark-state
/// ceiling, or 0 when none does.
struct SizeBudgetResult {
  std::vector<int> sizes;
  std::vector<double> budgets;
  std::vector<int> targets;
  std::vector<double> phi_opt;
  std::vector<double> tau_opt;
  std::vector<double> ceiling; // pdet_infinity per size
  Eigen::MatrixXd pdet;        // (size index, budget index)
  std::vector<double> saturation_budget;
};

inline SizeBudgetResult pdet_vs_size_and_budget(const std::vector<int>& sizes,
                                                const std::vector<double>& budgets,
                                                int workers = 0) {
  SizeBudgetResult result;
  result.sizes = sizes;
  result.budgets = budgets;
  const std::size_t n_sizes = sizes.size();
  result.targets.resize(n_sizes);
  result.phi_opt.resize(n_sizes);
  result.tau_opt.resize(n_sizes);
  result.ceiling.resize(n_sizes);
  result.saturation_budget.assign(n_sizes, 0.0);
  result.pdet.resize(n_sizes, budgets.size());

  for (std::size_t s = 0; s < n_sizes; ++s) {
    const int n = sizes[s];
    if (n < 3)
      throw config_error("size-budget: ring sizes must be >= 3, got " +
                         std::to_string(n));
    const bool even = n % 2 == 0;
    result.targets[s] = even ? n / 2 : (n - 1) / 2;
    result.phi_opt[s] = even ? 0.0 : M_PI / (2.0 * n);

    const double star = tau_star_analytic(n, result.phi_opt[s]);
    const double cap = std::isfinite(star) ? star - 1e-9 : 3.0;
    const bool degenerate_phase = !degenerate_pairs(n, result.phi_opt[s]).empty();
    const double scan_lo = 0.3, scan_step = 0.002;
    const int scan_n =
        std::max(2, static_cast<int>(std::floor((cap - scan_lo) / scan_step)) + 1);
    std::vector<double> mods(scan_n);
    parallel_for(scan_n, workers, [&](std::size_t i) {
      WalkConfig config{n, result.targets[s], result.phi_opt[s],
                        scan_lo + i * scan_step, 1.0};
      mods[i] = detail::relevant_modulus(config, degenerate_phase);
    });
    int arg = 0;
    for (int i = 1; i < scan_n; ++i)
      if (mods[i] < mods[arg]) arg = i;
    result.tau_opt[s] = scan_lo + arg * scan_step;

    WalkConfig ceiling_probe{n, result.targets[s], result.phi_opt[s],
                             result.tau_opt[s], 1.0};
    result.ceiling[s] = dark_report(ceiling_probe).pdet_infinity;
  }

  parallel_for(n_sizes * budgets.size(), workers, [&](std::size_t cell) {
    const std::size_t s = cell / budgets.size();
    const std::size_t b = cell % budgets.size();
    WalkConfig config{result.sizes[s], result.targets[s], result.phi_opt[s],
                      result.tau_opt[s], budgets[b]};
    result.pdet(s, b) = detection_probability_at_budget(config);
  });

  for (std::size_t s = 0; s < n_sizes; ++s)
    for (std::size_t b = 0; b < budgets.size(); ++b)
      if (result.pdet(s, b) >= 0.99 * result.ceiling[s]) {
        result.saturation_budget[s] = budgets[b];
        break;
      }
  return result;
}

} // namespace ringwalk
