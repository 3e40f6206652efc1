#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ringwalk {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr const char* kVersion = "0.1.0";

/// Invalid user input: bad flag values, malformed config files, impossible
/// parameter combinations. Maps to exit code 1 in the CLI.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure inside a computation (e.g. an eigensolver that did not
/// converge). Maps to exit code 2 in the CLI.
class computation_error : public std::runtime_error {
 public:
  explicit computation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Parameters of one monitored-walk experiment: ring size, target site,
/// hopping phase, detection period and total observation time, plus the
/// numerical tolerances shared by the analysis routines.
struct WalkConfig {
  int num_sites = 0;       // N >= 3
  int target = 0;          // detection site, 0 < target < N
  double phi = 0.0;        // hopping phase, |phi| <= pi/N
  double tau = 0.0;        // detection period, > 0
  double total_time = 0.0; // observation budget T, > 0

  double tol_degenerate = 1e-9; // eigenvalue-degeneracy tolerance
  double tol_unit = 1e-9;       // unit-modulus tolerance

  void validate() const {
    if (num_sites < 3)
      throw config_error("n: ring must have at least 3 sites, got " +
                         std::to_string(num_sites));
    if (target <= 0 || target >= num_sites)
      throw config_error("delta: target site must lie in (0, " +
                         std::to_string(num_sites) + "), got " +
                         std::to_string(target));
    const double phi_max = M_PI / num_sites + 1e-12;
    if (std::abs(phi) > phi_max)
      throw config_error("phi: |phi| must not exceed pi/n = " +
                         std::to_string(M_PI / num_sites) + ", got " +
                         std::to_string(phi));
    if (!(tau > 0.0))
      throw config_error("tau: detection period must be positive, got " +
                         std::to_string(tau));
    if (!(total_time > 0.0))
      throw config_error("total_time: observation budget must be positive, got " +
                         std::to_string(total_time));
  }

  /// Number of detection attempts that fit into the observation budget.
  std::size_t max_attempts() const {
    const double n = std::floor(total_time / tau);
    if (n < 1.0)
      throw config_error("invalid budget: floor(total_time/tau) < 1 for tau=" +
                         std::to_string(tau) + ", total_time=" +
                         std::to_string(total_time));
    return static_cast<std::size_t>(n);
  }

  /// One-line summary with round-trip numeric precision, suitable for
  /// embedding in result-table provenance.
  std::string describe() const {
    const auto num = [](double v) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      return std::string(buf);
    };
    return "n=" + std::to_string(num_sites) + " delta=" + std::to_string(target) +
           " phi=" + num(phi) + " tau=" + num(tau) +
           " total_time=" + num(total_time);
  }
};

} // namespace ringwalk
