#pragma once

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ringwalk/dark_states.hpp"
#include "ringwalk/monitored.hpp"
#include "ringwalk/optimizer.hpp"
#include "ringwalk/perron_frobenius.hpp"
#include "ringwalk/ring_model.hpp"
#include "ringwalk/table.hpp"
#include "ringwalk/walk_config.hpp"

namespace ringwalk {

/// Everything a subcommand can be told, from a config file and/or flags.
/// Unset fields fall back to per-subcommand defaults or raise a named error
/// if the subcommand cannot run without them.
struct ExperimentConfig {
  std::optional<int> num_sites;
  std::optional<int> target;
  std::optional<double> phi;
  std::optional<double> phi_over_pin; // phi expressed in units of pi/N
  std::optional<double> tau;
  std::optional<double> total_time;
  std::optional<GridSpec> phi_grid;
  std::optional<GridSpec> tau_grid;
  std::optional<GridSpec> time_grid;
  std::optional<GridSpec> size_grid;
  std::optional<int> k_max;
  std::optional<int> workers;
  std::optional<double> tol_degenerate;
  std::optional<double> tol_unit;
  std::optional<std::string> out;

  /// Overlay: fields set in `other` replace fields set here.
  void merge_from(const ExperimentConfig& other) {
    if (other.num_sites) num_sites = other.num_sites;
    if (other.target) target = other.target;
    if (other.phi) phi = other.phi;
    if (other.phi_over_pin) phi_over_pin = other.phi_over_pin;
    if (other.tau) tau = other.tau;
    if (other.total_time) total_time = other.total_time;
    if (other.phi_grid) phi_grid = other.phi_grid;
    if (other.tau_grid) tau_grid = other.tau_grid;
    if (other.time_grid) time_grid = other.time_grid;
    if (other.size_grid) size_grid = other.size_grid;
    if (other.k_max) k_max = other.k_max;
    if (other.workers) workers = other.workers;
    if (other.tol_degenerate) tol_degenerate = other.tol_degenerate;
    if (other.tol_unit) tol_unit = other.tol_unit;
    if (other.out) out = other.out;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

inline double parse_double(const std::string& text, const std::string& context) {
  const std::string value = trim(text);
  char* end = nullptr;
  const double parsed = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size())
    throw config_error(context + ": expected a number, got '" + value + "'");
  return parsed;
}

inline int parse_int(const std::string& text, const std::string& context) {
  const double parsed = parse_double(text, context);
  const int as_int = static_cast<int>(parsed);
  if (parsed != static_cast<double>(as_int))
    throw config_error(context + ": expected an integer, got '" + trim(text) + "'");
  return as_int;
}

inline GridSpec parse_grid(const std::string& text, const std::string& context) {
  const std::string value = trim(text);
  const auto c1 = value.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : value.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw config_error(context + ": expected LO:HI:COUNT, got '" + value + "'");
  GridSpec grid;
  grid.lo = parse_double(value.substr(0, c1), context + " (LO)");
  grid.hi = parse_double(value.substr(c1 + 1, c2 - c1 - 1), context + " (HI)");
  grid.count = parse_int(value.substr(c2 + 1), context + " (COUNT)");
  if (grid.count < 1)
    throw config_error(context + ": COUNT must be at least 1, got " +
                       std::to_string(grid.count));
  return grid;
}

inline std::string format_grid(const GridSpec& grid) {
  return ResultTable::format(grid.lo) + ":" + ResultTable::format(grid.hi) + ":" +
         std::to_string(grid.count);
}

inline std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

} // namespace detail

/// Parse a flat key = value file with '#' comments. Unknown keys and
/// malformed values are reported with `label:line` so the offending line is
/// easy to find.
inline ExperimentConfig parse_config_stream(std::istream& in,
                                            const std::string& label) {
  ExperimentConfig config;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = detail::trim(line);
    if (stripped.empty()) continue;

    const std::string where = label + ":" + std::to_string(line_number);
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw config_error(where + ": expected key = value, got '" + stripped + "'");
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    if (key.empty()) throw config_error(where + ": missing key before '='");
    if (value.empty())
      throw config_error(where + ": missing value for key '" + key + "'");

    // Range checks that do not need other keys happen here so the error can
    // carry the line number; cross-key constraints (|phi| <= pi/n, delta < n)
    // are re-validated when the walk configuration is assembled.
    const std::string context = where + " (" + key + ")";
    if (key == "n") {
      config.num_sites = detail::parse_int(value, context);
      if (*config.num_sites < 3)
        throw config_error(context + ": ring must have at least 3 sites");
    } else if (key == "delta") {
      config.target = detail::parse_int(value, context);
      if (*config.target < 1)
        throw config_error(context + ": target site must be positive");
    } else if (key == "phi") config.phi = detail::parse_double(value, context);
    else if (key == "phi_over_pin") {
      config.phi_over_pin = detail::parse_double(value, context);
      if (std::abs(*config.phi_over_pin) > 1.0 + 1e-12)
        throw config_error(context + ": phi_over_pin must lie in [-1, 1]");
    } else if (key == "tau") {
      config.tau = detail::parse_double(value, context);
      if (!(*config.tau > 0.0))
        throw config_error(context + ": detection period must be positive");
    } else if (key == "total_time") {
      config.total_time = detail::parse_double(value, context);
      if (!(*config.total_time > 0.0))
        throw config_error(context + ": observation budget must be positive");
    }
    else if (key == "phi_grid") config.phi_grid = detail::parse_grid(value, context);
    else if (key == "tau_grid") config.tau_grid = detail::parse_grid(value, context);
    else if (key == "time_grid") config.time_grid = detail::parse_grid(value, context);
    else if (key == "size_grid") config.size_grid = detail::parse_grid(value, context);
    else if (key == "k_max") {
      config.k_max = detail::parse_int(value, context);
      if (*config.k_max < 1)
        throw config_error(context + ": winding cutoff must be at least 1");
    } else if (key == "workers") {
      config.workers = detail::parse_int(value, context);
      if (*config.workers < 0)
        throw config_error(context + ": worker count must not be negative");
    } else if (key == "tol_degenerate") {
      config.tol_degenerate = detail::parse_double(value, context);
      if (!(*config.tol_degenerate > 0.0))
        throw config_error(context + ": tolerance must be positive");
    } else if (key == "tol_unit") {
      config.tol_unit = detail::parse_double(value, context);
      if (!(*config.tol_unit > 0.0))
        throw config_error(context + ": tolerance must be positive");
    } else if (key == "out") config.out = value;
    else throw config_error(where + ": unknown key '" + key + "'");
  }
  return config;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config file '" + path + "' cannot be opened");
  return parse_config_stream(in, path);
}

namespace detail {

template <typename T>
T require(const std::optional<T>& field, const std::string& subcommand,
          const std::string& name) {
  if (!field)
    throw config_error(subcommand + ": missing required parameter '" + name + "'");
  return *field;
}

/// Resolve the phase from --phi / --phi-over-pin (mutually exclusive).
inline double resolve_phi(const ExperimentConfig& cfg, int num_sites,
                          const std::string& subcommand) {
  if (cfg.phi && cfg.phi_over_pin)
    throw config_error(subcommand +
                       ": phi and phi_over_pin are mutually exclusive; give one");
  if (cfg.phi) return *cfg.phi;
  if (cfg.phi_over_pin) return *cfg.phi_over_pin * M_PI / num_sites;
  throw config_error(subcommand + ": missing required parameter 'phi' (or 'phi_over_pin')");
}

inline bool has_phi(const ExperimentConfig& cfg) {
  return cfg.phi.has_value() || cfg.phi_over_pin.has_value();
}

inline WalkConfig walk_config(const ExperimentConfig& cfg,
                              const std::string& subcommand,
                              std::optional<double> default_total_time = {}) {
  WalkConfig config;
  config.num_sites = require(cfg.num_sites, subcommand, "n");
  config.target = require(cfg.target, subcommand, "delta");
  config.phi = resolve_phi(cfg, config.num_sites, subcommand);
  config.tau = require(cfg.tau, subcommand, "tau");
  if (cfg.total_time) config.total_time = *cfg.total_time;
  else if (default_total_time) config.total_time = *default_total_time;
  else config.total_time = require(cfg.total_time, subcommand, "total_time");
  if (cfg.tol_degenerate) config.tol_degenerate = *cfg.tol_degenerate;
  if (cfg.tol_unit) config.tol_unit = *cfg.tol_unit;
  config.validate();
  return config;
}

inline ResultTable make_table(const std::string& subcommand,
                              const std::string& resolved) {
  ResultTable table;
  table.add_provenance(std::string("ringwalk ") + kVersion);
  table.add_provenance("subcommand: " + subcommand);
  table.add_provenance("config: " + resolved);
  table.add_provenance("generated_at: " + timestamp_utc());
  return table;
}

inline int resolve_workers(const ExperimentConfig& cfg) {
  return cfg.workers.value_or(0);
}

} // namespace detail

inline ResultTable run_spectrum(const ExperimentConfig& cfg) {
  const int n = detail::require(cfg.num_sites, "spectrum", "n");
  const double phi = detail::resolve_phi(cfg, n, "spectrum");
  ResultTable table = detail::make_table(
      "spectrum", "n=" + std::to_string(n) + " phi=" + ResultTable::format(phi));
  table.columns = {"j", "lambda_j"};
  const Spectrum s = analytic_spectrum(n, phi);
  for (int j = 0; j < n; ++j)
    table.add_row({static_cast<double>(j), s.eigenvalues[j]});
  return table;
}

inline ResultTable run_pdet_series(const ExperimentConfig& cfg) {
  const WalkConfig config = detail::walk_config(cfg, "pdet-series");
  ResultTable table = detail::make_table("pdet-series", config.describe());
  table.columns = {"m", "t", "F_m", "pdet", "survival"};
  const DetectionRecord record = first_detection_series(config);
  for (std::size_t m = 0; m < record.attempts(); ++m)
    table.add_row({static_cast<double>(m + 1), (m + 1) * config.tau,
                   record.first_detection[m], record.cumulative[m],
                   record.survival[m]});
  return table;
}

inline ResultTable run_pdet_sweep(const ExperimentConfig& cfg) {
  const int n = detail::require(cfg.num_sites, "pdet-sweep", "n");
  const int target = detail::require(cfg.target, "pdet-sweep", "delta");
  const double total_time = detail::require(cfg.total_time, "pdet-sweep", "total_time");
  const GridSpec phi_grid = cfg.phi_grid.value_or(default_phi_grid(n));
  const GridSpec tau_grid = cfg.tau_grid.value_or(default_tau_grid());
  const int workers = detail::resolve_workers(cfg);

  ResultTable table = detail::make_table(
      "pdet-sweep", "n=" + std::to_string(n) + " delta=" + std::to_string(target) +
                        " total_time=" + ResultTable::format(total_time) +
                        " phi_grid=" + detail::format_grid(phi_grid) +
                        " tau_grid=" + detail::format_grid(tau_grid) +
                        " workers=" + std::to_string(workers));
  table.columns = {"phi", "tau", "n_attempts", "pdet"};
  const SweepResult result = sweep(n, target, total_time, phi_grid, tau_grid, workers);
  for (std::size_t i = 0; i < result.phi_values.size(); ++i)
    for (std::size_t j = 0; j < result.tau_values.size(); ++j)
      table.add_row({result.phi_values[i], result.tau_values[j],
                     static_cast<double>(result.attempts[j]), result.pdet(i, j)});
  return table;
}

inline ResultTable run_pf_spectrum(const ExperimentConfig& cfg) {
  const WalkConfig config = detail::walk_config(cfg, "pf-spectrum", 1.0);
  ResultTable table = detail::make_table("pf-spectrum", config.describe());

  const PFSpectrum spectrum = pf_spectrum(config);
  const bool degenerate_phase =
      !degenerate_pairs(config.num_sites, config.phi, config.tol_degenerate).empty();
  const AsymptoticScale scale = asymptotic_scale(spectrum, degenerate_phase);
  table.add_provenance("leading_modulus = " +
                       ResultTable::format(spectrum.leading_modulus));
  table.add_provenance("subleading_modulus = " +
                       ResultTable::format(spectrum.subleading_modulus));
  table.add_provenance(std::string("gap = ") + ResultTable::format(scale.gap) +
                       " t_asymptotic = " + ResultTable::format(scale.t_asymptotic) +
                       " (from " + (degenerate_phase ? "subleading" : "leading") +
                       " modulus)");
  const SurvivalEstimate check = survival_spectral_estimate(spectrum, 100);
  table.add_provenance("survival_check_n100: spectral=" +
                       ResultTable::format(check.spectral) + " iterated=" +
                       ResultTable::format(check.iterated) + " deviation=" +
                       ResultTable::format(check.deviation));

  table.columns = {"j", "mu_re", "mu_im", "mu_abs", "overlap_sq"};
  for (int j = 0; j < config.num_sites; ++j)
    table.add_row({static_cast<double>(j), spectrum.eigenvalues[j].real(),
                   spectrum.eigenvalues[j].imag(),
                   std::abs(spectrum.eigenvalues[j]), spectrum.overlaps[j]});
  return table;
}

inline ResultTable run_pf_sweep(const ExperimentConfig& cfg) {
  const int n = detail::require(cfg.num_sites, "pf-sweep", "n");
  const int target = detail::require(cfg.target, "pf-sweep", "delta");
  const GridSpec phi_grid = cfg.phi_grid.value_or(default_phi_grid(n));
  const GridSpec tau_grid = cfg.tau_grid.value_or(default_tau_grid());
  const int workers = detail::resolve_workers(cfg);

  ResultTable table = detail::make_table(
      "pf-sweep", "n=" + std::to_string(n) + " delta=" + std::to_string(target) +
                      " phi_grid=" + detail::format_grid(phi_grid) +
                      " tau_grid=" + detail::format_grid(tau_grid) +
                      " workers=" + std::to_string(workers));
  table.columns = {"phi", "tau", "mu_pf_abs", "mu_sub_abs", "gap", "t_as"};

  const std::vector<double> phis = phi_grid.values();
  const std::vector<double> taus = tau_grid.values();
  struct Cell {
    double lead, sub, gap, t_as;
  };
  std::vector<Cell> cells(phis.size() * taus.size());
  std::vector<char> degenerate(phis.size());
  for (std::size_t i = 0; i < phis.size(); ++i)
    degenerate[i] = !degenerate_pairs(n, phis[i]).empty();
  parallel_for(cells.size(), workers, [&](std::size_t cell) {
    const std::size_t i = cell / taus.size();
    const std::size_t j = cell % taus.size();
    WalkConfig config{n, target, phis[i], taus[j], 1.0};
    if (cfg.tol_degenerate) config.tol_degenerate = *cfg.tol_degenerate;
    if (cfg.tol_unit) config.tol_unit = *cfg.tol_unit;
    const PFSpectrum spectrum = pf_spectrum(config);
    const AsymptoticScale scale = asymptotic_scale(spectrum, degenerate[i] != 0);
    cells[cell] = {spectrum.leading_modulus, spectrum.subleading_modulus, scale.gap,
                  scale.t_asymptotic};
  });
  for (std::size_t i = 0; i < phis.size(); ++i)
    for (std::size_t j = 0; j < taus.size(); ++j) {
      const Cell& c = cells[i * taus.size() + j];
      table.add_row({phis[i], taus[j], c.lead, c.sub, c.gap, c.t_as});
    }
  return table;
}

inline ResultTable run_dark_report(const ExperimentConfig& cfg) {
  const WalkConfig config = detail::walk_config(cfg, "dark-report", 1.0);
  ResultTable table = detail::make_table("dark-report", config.describe());
  table.columns = {"origin", "m", "n", "k", "overlap_sq", "pf_eigval_re",
                   "pf_eigval_im"};
  const DarkReport report = dark_report(config);
  for (const auto& state : report.dark_basis) {
    auto& row = table.start_row();
    row.push_back(state.origin_name());
    row.push_back(ResultTable::format(state.level_m));
    row.push_back(ResultTable::format(state.level_n));
    row.push_back(ResultTable::format(state.winding));
    row.push_back(ResultTable::format(std::norm(state.vector[0])));
    row.push_back(ResultTable::format(state.pf_eigenvalue.real()));
    row.push_back(ResultTable::format(state.pf_eigenvalue.imag()));
  }
  // Summary row: overlap_sq holds the total dark weight of the start state,
  // pf_eigval_re the detection ceiling 1 - overlap.
  auto& summary = table.start_row();
  summary.push_back("summary");
  summary.push_back(ResultTable::format(-1));
  summary.push_back(ResultTable::format(-1));
  summary.push_back(ResultTable::format(0));
  summary.push_back(ResultTable::format(report.initial_overlap));
  summary.push_back(ResultTable::format(report.pdet_infinity));
  summary.push_back(ResultTable::format(0.0));
  return table;
}

inline ResultTable run_dark_count(const ExperimentConfig& cfg) {
  const int n = detail::require(cfg.num_sites, "dark-count", "n");
  const GridSpec tau_grid = cfg.tau_grid.value_or(GridSpec{0.5, 5.0, 19});
  const double phi_lo = cfg.phi_grid ? cfg.phi_grid->lo : -M_PI / n;
  const double phi_hi = cfg.phi_grid ? cfg.phi_grid->hi : M_PI / n;

  std::string resolved = "n=" + std::to_string(n) + " phi_window=[" +
                         ResultTable::format(phi_lo) + "," +
                         ResultTable::format(phi_hi) + "] tau_grid=" +
                         detail::format_grid(tau_grid);
  if (cfg.k_max) resolved += " k_max=" + std::to_string(*cfg.k_max);
  ResultTable table = detail::make_table("dark-count", resolved);
  table.columns = {"tau", "count"};
  for (const double tau : tau_grid.values()) {
    const int k_max = cfg.k_max.value_or(default_winding_cutoff(tau));
    table.add_row({tau, static_cast<double>(dark_state_count_in_window(
                            n, phi_lo, phi_hi, tau, k_max))});
  }
  return table;
}

inline ResultTable run_tau_star(const ExperimentConfig& cfg) {
  const int n = detail::require(cfg.num_sites, "tau-star", "n");
  const int target = detail::require(cfg.target, "tau-star", "delta");
  std::vector<double> phis;
  std::string resolved = "n=" + std::to_string(n) + " delta=" + std::to_string(target);
  if (cfg.phi_grid) {
    phis = cfg.phi_grid->values();
    resolved += " phi_grid=" + detail::format_grid(*cfg.phi_grid);
  } else {
    phis.push_back(detail::resolve_phi(cfg, n, "tau-star"));
    resolved += " phi=" + ResultTable::format(phis[0]);
  }

  ResultTable table = detail::make_table("tau-star", resolved);
  table.columns = {"phi", "tau_star_analytic", "tau_star_empirical",
                   "disagreement_flag"};
  for (const double phi : phis) {
    const TauStarResult result = tau_star(n, phi, target);
    table.add_row({phi, result.analytic, result.empirical,
                   result.disagree ? 1.0 : 0.0});
  }
  return table;
}

inline ResultTable run_optimize(const ExperimentConfig& cfg) {
  const int n = detail::require(cfg.num_sites, "optimize", "n");
  const int target = detail::require(cfg.target, "optimize", "delta");
  const double total_time = detail::require(cfg.total_time, "optimize", "total_time");
  const GridSpec phi_grid = cfg.phi_grid.value_or(default_phi_grid(n));
  const GridSpec tau_grid = cfg.tau_grid.value_or(default_tau_grid());
  const int workers = detail::resolve_workers(cfg);

  ResultTable table = detail::make_table(
      "optimize", "n=" + std::to_string(n) + " delta=" + std::to_string(target) +
                      " total_time=" + ResultTable::format(total_time) +
                      " phi_grid=" + detail::format_grid(phi_grid) +
                      " tau_grid=" + detail::format_grid(tau_grid) +
                      " workers=" + std::to_string(workers));
  table.columns = {"phi_opt", "tau_opt", "pdet", "tau_star_analytic",
                   "tau_star_empirical", "tau_pf", "mirror_phi", "mirror_delta"};
  const Optimum opt = optimize(n, target, total_time, phi_grid, tau_grid, workers);
  table.add_row({opt.phi_opt, opt.tau_opt, opt.pdet, opt.tau_star_analytic,
                 opt.tau_star_empirical, opt.tau_pf, opt.mirror_phi,
                 static_cast<double>(opt.mirror_target)});
  return table;
}

inline ResultTable run_tas_curve(const ExperimentConfig& cfg) {
  const int n = detail::require(cfg.num_sites, "tas-curve", "n");
  const int target = detail::require(cfg.target, "tas-curve", "delta");
  const double phi = detail::resolve_phi(cfg, n, "tas-curve");
  const GridSpec tau_grid = cfg.tau_grid.value_or(default_tau_grid());
  const int workers = detail::resolve_workers(cfg);

  ResultTable table = detail::make_table(
      "tas-curve", "n=" + std::to_string(n) + " delta=" + std::to_string(target) +
                       " phi=" + ResultTable::format(phi) + " tau_grid=" +
                       detail::format_grid(tau_grid) + " workers=" +
                       std::to_string(workers));
  table.columns = {"tau", "gap", "t_as"};
  for (const TasCurvePoint& point : tas_vs_tau(n, target, phi, tau_grid.values(),
                                               workers))
    table.add_row({point.tau, point.gap, point.t_asymptotic});
  return table;
}

inline ResultTable run_size_budget(const ExperimentConfig& cfg) {
  const GridSpec size_grid = detail::require(cfg.size_grid, "size-budget", "size_grid");
  const GridSpec time_grid = detail::require(cfg.time_grid, "size-budget", "time_grid");
  const int workers = detail::resolve_workers(cfg);

  std::vector<int> sizes;
  for (const double v : size_grid.values()) {
    const int n = static_cast<int>(std::lround(v));
    if (std::abs(v - n) > 1e-9)
      throw config_error("size-budget: size_grid must contain integers, got " +
                         ResultTable::format(v));
    sizes.push_back(n);
  }

  ResultTable table = detail::make_table(
      "size-budget", "size_grid=" + detail::format_grid(size_grid) + " time_grid=" +
                         detail::format_grid(time_grid) + " workers=" +
                         std::to_string(workers));
  table.columns = {"N", "T", "tau_opt", "phi_opt", "pdet"};
  const SizeBudgetResult result =
      pdet_vs_size_and_budget(sizes, time_grid.values(), workers);
  for (std::size_t s = 0; s < result.sizes.size(); ++s) {
    table.add_provenance(
        "N=" + std::to_string(result.sizes[s]) + ": saturation_budget=" +
        ResultTable::format(result.saturation_budget[s]) + " ceiling=" +
        ResultTable::format(result.ceiling[s]));
    for (std::size_t b = 0; b < result.budgets.size(); ++b)
      table.add_row({static_cast<double>(result.sizes[s]), result.budgets[b],
                     result.tau_opt[s], result.phi_opt[s], result.pdet(s, b)});
  }
  return table;
}

inline ResultTable run_unitary_baseline(const ExperimentConfig& cfg) {
  const int n = detail::require(cfg.num_sites, "unitary-baseline", "n");
  const int target = detail::require(cfg.target, "unitary-baseline", "delta");
  const GridSpec time_grid = cfg.time_grid.value_or(GridSpec{0.0, 200.0, 2001});
  std::vector<double> phis;
  std::string resolved = "n=" + std::to_string(n) + " delta=" + std::to_string(target);
  if (cfg.phi_grid) {
    phis = cfg.phi_grid->values();
    resolved += " phi_grid=" + detail::format_grid(*cfg.phi_grid);
  } else {
    phis.push_back(detail::resolve_phi(cfg, n, "unitary-baseline"));
    resolved += " phi=" + ResultTable::format(phis[0]);
  }
  resolved += " time_grid=" + detail::format_grid(time_grid);

  ResultTable table = detail::make_table("unitary-baseline", resolved);
  table.columns = {"phi", "t", "p_delta"};
  const std::vector<double> times = time_grid.values();
  for (const double phi : phis) {
    const Spectrum spectrum = analytic_spectrum(n, phi);
    for (const double t : times)
      table.add_row({phi, t, unitary_transfer_probability(spectrum, target, t)});
  }
  return table;
}

inline const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = {
      "spectrum",   "pdet-series", "pdet-sweep", "pf-spectrum",
      "pf-sweep",   "dark-report", "dark-count", "tau-star",
      "optimize",   "tas-curve",   "size-budget", "unitary-baseline"};
  return names;
}

/// Dispatch a subcommand against a fully merged configuration.
inline ResultTable run_subcommand(const std::string& name,
                                  const ExperimentConfig& cfg) {
  if (name == "spectrum") return run_spectrum(cfg);
  if (name == "pdet-series") return run_pdet_series(cfg);
  if (name == "pdet-sweep") return run_pdet_sweep(cfg);
  if (name == "pf-spectrum") return run_pf_spectrum(cfg);
  if (name == "pf-sweep") return run_pf_sweep(cfg);
  if (name == "dark-report") return run_dark_report(cfg);
  if (name == "dark-count") return run_dark_count(cfg);
  if (name == "tau-star") return run_tau_star(cfg);
  if (name == "optimize") return run_optimize(cfg);
  if (name == "tas-curve") return run_tas_curve(cfg);
  if (name == "size-budget") return run_size_budget(cfg);
  if (name == "unitary-baseline") return run_unitary_baseline(cfg);
  throw config_error("unknown subcommand '" + name + "'");
}

/// Exit-code policy: 0 success, 1 invalid configuration or flags,
/// 2 computation failure.
inline int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const config_error*>(&error)) return 1;
  if (dynamic_cast<const std::invalid_argument*>(&error)) return 1;
  return 2;
}

} // namespace ringwalk
