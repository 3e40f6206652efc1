#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ringwalk/cli.hpp"

namespace {

struct RawFlags {
  std::string config_path;
  std::optional<int> num_sites, target, workers, k_max;
  std::optional<double> phi, phi_over_pin, tau, total_time;
  std::optional<double> tol_degenerate, tol_unit;
  std::optional<std::string> phi_grid, tau_grid, time_grid, size_grid;
  std::optional<std::string> out;
};

void add_common_flags(CLI::App* app, RawFlags& flags) {
  app->add_option("--config", flags.config_path,
                  "Key = value configuration file; flags override its entries");
  app->add_option("--n", flags.num_sites, "Number of ring sites (>= 3)");
  app->add_option("--delta", flags.target, "Target site, 0 < delta < n");
  app->add_option("--phi", flags.phi, "Hopping phase, |phi| <= pi/n");
  app->add_option("--phi-over-pin", flags.phi_over_pin,
                  "Hopping phase in units of pi/n (alternative to --phi)");
  app->add_option("--tau", flags.tau, "Detection period (> 0)");
  app->add_option("--total-time", flags.total_time, "Observation budget (> 0)");
  app->add_option("--phi-grid", flags.phi_grid, "Phase grid LO:HI:COUNT");
  app->add_option("--tau-grid", flags.tau_grid, "Period grid LO:HI:COUNT");
  app->add_option("--time-grid", flags.time_grid,
                  "Time/budget grid LO:HI:COUNT (unitary-baseline, size-budget)");
  app->add_option("--size-grid", flags.size_grid,
                  "Ring-size grid LO:HI:COUNT (size-budget)");
  app->add_option("--k-max", flags.k_max,
                  "Winding cutoff for dark-count (default covers all solvable k)");
  app->add_option("--workers", flags.workers,
                  "Worker threads (default: hardware concurrency)");
  app->add_option("--tol-degenerate", flags.tol_degenerate,
                  "Eigenvalue-degeneracy tolerance (default 1e-9)");
  app->add_option("--tol-unit", flags.tol_unit,
                  "Unit-modulus tolerance (default 1e-9)");
  app->add_option("--out", flags.out, "Output CSV path (default: stdout)");
}

ringwalk::ExperimentConfig to_config(const RawFlags& flags,
                                     const std::string& subcommand) {
  ringwalk::ExperimentConfig merged;
  if (!flags.config_path.empty())
    merged = ringwalk::parse_config_file(flags.config_path);

  ringwalk::ExperimentConfig overrides;
  overrides.num_sites = flags.num_sites;
  overrides.target = flags.target;
  overrides.phi = flags.phi;
  overrides.phi_over_pin = flags.phi_over_pin;
  overrides.tau = flags.tau;
  overrides.total_time = flags.total_time;
  overrides.k_max = flags.k_max;
  overrides.workers = flags.workers;
  overrides.tol_degenerate = flags.tol_degenerate;
  overrides.tol_unit = flags.tol_unit;
  overrides.out = flags.out;
  const std::string where = subcommand + " flags";
  if (flags.phi_grid)
    overrides.phi_grid = ringwalk::detail::parse_grid(*flags.phi_grid,
                                                      where + " (--phi-grid)");
  if (flags.tau_grid)
    overrides.tau_grid = ringwalk::detail::parse_grid(*flags.tau_grid,
                                                      where + " (--tau-grid)");
  if (flags.time_grid)
    overrides.time_grid = ringwalk::detail::parse_grid(*flags.time_grid,
                                                       where + " (--time-grid)");
  if (flags.size_grid)
    overrides.size_grid = ringwalk::detail::parse_grid(*flags.size_grid,
                                                       where + " (--size-grid)");
  merged.merge_from(overrides);

  // A phase given on the command line beats a phase from the file in either
  // spelling: the two forms are exclusive within one source, not across.
  if (flags.phi && !flags.phi_over_pin) merged.phi_over_pin.reset();
  if (flags.phi_over_pin && !flags.phi) merged.phi.reset();
  return merged;
}

const char* describe_subcommand(const std::string& name) {
  if (name == "spectrum") return "Closed-form walk eigenvalues for one ring";
  if (name == "pdet-series") return "First-detection record of one monitored run";
  if (name == "pdet-sweep") return "Detection probability over a phase/period grid";
  if (name == "pf-spectrum") return "Eigenvalues of the survival (cycle) operator";
  if (name == "pf-sweep") return "Leading moduli and spectral gap over a grid";
  if (name == "dark-report") return "Basis of undetectable states at one working point";
  if (name == "dark-count") return "Number of dark states vs detection period";
  if (name == "tau-star") return "Threshold period where dark states first appear";
  if (name == "optimize") return "Best phase and period for a detection budget";
  if (name == "tas-curve") return "Asymptotic detection timescale vs period";
  if (name == "size-budget") return "Optimized detection vs ring size and budget";
  if (name == "unitary-baseline") return "Unmonitored transfer probability vs time";
  return "";
}

int emit(const ringwalk::ResultTable& table,
         const std::optional<std::string>& out_path) {
  if (!out_path || out_path->empty() || *out_path == "-") {
    table.write(std::cout);
    return 0;
  }
  std::ofstream out(*out_path);
  if (!out)
    throw ringwalk::config_error("cannot open output file '" + *out_path + "'");
  table.write(out);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monitored chiral walk on a ring: simulation and spectral analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("ringwalk ") + ringwalk::kVersion);

  std::vector<std::pair<std::string, RawFlags>> subcommands;
  subcommands.reserve(ringwalk::subcommand_names().size());
  for (const std::string& name : ringwalk::subcommand_names()) {
    subcommands.emplace_back(name, RawFlags{});
    CLI::App* sub = app.add_subcommand(name, describe_subcommand(name));
    add_common_flags(sub, subcommands.back().second);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    for (const auto& [name, flags] : subcommands) {
      if (!app.get_subcommand(name)->parsed()) continue;
      const ringwalk::ExperimentConfig config = to_config(flags, name);
      return emit(ringwalk::run_subcommand(name, config), config.out);
    }
    std::cerr << "ringwalk: no subcommand selected\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "ringwalk: " << e.what() << '\n';
    return ringwalk::exit_code_for(e);
  }
}
