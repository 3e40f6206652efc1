#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ringwalk/monitored.hpp"
#include "ringwalk/perron_frobenius.hpp"
#include "ringwalk/ring_model.hpp"
#include "test_support.hpp"

using Catch::Approx;
using namespace ringwalk;

TEST_CASE("the cycle operator is the propagator with the target row removed") {
  WalkConfig config{9, 4, 0.2, 1.3, 50.0};
  const ComplexMatrix op = build_pf_operator(config);

  ComplexMatrix expected = propagator(config.num_sites, config.phi, config.tau);
  expected.row(config.target).setZero();
  REQUIRE((op - expected).cwiseAbs().maxCoeff() < 1e-14);

  SECTION("a vanishing period leaves the identity minus the target row") {
    WalkConfig quick{7, 3, 0.15, 1e-12, 1.0};
    ComplexMatrix near_identity = build_pf_operator(quick);
    ComplexMatrix reference = ComplexMatrix::Identity(7, 7);
    reference.row(3).setZero();
    REQUIRE((near_identity - reference).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("rewinding the target site by one period lands in the kernel") {
  SECTION("working point") {
    WalkConfig config{21, 10, M_PI / 42, 1.4, 200.0};
    const ComplexMatrix op = build_pf_operator(config);
    const ComplexMatrix rewind =
        propagator(config.num_sites, config.phi, -config.tau);
    StateVector probe = StateVector::Zero(config.num_sites);
    probe[config.target] = 1.0;
    REQUIRE((op * (rewind * probe)).norm() < 1e-12);
  }

  SECTION("random configurations") {
    testing::ConfigSampler sampler(404);
    for (int trial = 0; trial < 10; ++trial) {
      const WalkConfig config = sampler.next();
      const ComplexMatrix op = build_pf_operator(config);
      const ComplexMatrix rewind =
          propagator(config.num_sites, config.phi, -config.tau);
      StateVector probe = StateVector::Zero(config.num_sites);
      probe[config.target] = 1.0;
      REQUIRE((op * (rewind * probe)).norm() < 1e-12);
    }
  }
}

TEST_CASE("powers of the cycle operator reproduce the monitored survival") {
  WalkConfig config{6, 3, 0.1, 1.0, 100.0};
  const ComplexMatrix op = build_pf_operator(config);
  const auto record = first_detection_series(config, 50);

  StateVector state = StateVector::Zero(config.num_sites);
  state[0] = 1.0;
  for (std::size_t n = 1; n <= 50; ++n) {
    state = op * state;
    REQUIRE(state.squaredNorm() == Approx(record.survival[n - 1]).margin(1e-10));
  }
}

TEST_CASE("the cycle spectrum is sorted, contractive, and has one null mode") {
  testing::ConfigSampler sampler(505);
  for (int trial = 0; trial < 12; ++trial) {
    const WalkConfig config = sampler.next();
    const PFSpectrum spectrum = pf_spectrum(config);

    int null_modes = 0;
    for (int j = 0; j < config.num_sites; ++j) {
      const double modulus = std::abs(spectrum.eigenvalues[j]);
      REQUIRE(modulus <= 1.0 + 1e-9);
      if (j > 0)
        REQUIRE(modulus <= std::abs(spectrum.eigenvalues[j - 1]) + 1e-12);
      if (modulus < 1e-9) ++null_modes;
    }
    REQUIRE(null_modes == 1);
    REQUIRE(spectrum.leading_modulus == std::abs(spectrum.eigenvalues[0]));
  }
}

TEST_CASE("no cycle mode exceeds the unit circle anywhere on a parameter grid") {
  const int n = 12;
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 30; ++j) {
      const double phi = -M_PI / n + (2.0 * M_PI / n) * i / 29.0;
      const double tau = 0.1 + (3.0 - 0.1) * j / 29.0;
      WalkConfig config{n, 6, phi, tau, 1.0};
      REQUIRE(pf_spectrum(config).leading_modulus <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("away from special phases every mode decays strictly") {
  WalkConfig working{21, 10, M_PI / 42, 1.0, 1.0};
  REQUIRE(pf_spectrum(working).leading_modulus < 1.0 - 1e-9);

  for (const int n : {11, 15, 21}) {
    for (const double phi : {M_PI / (2.0 * n), M_PI / (3.0 * n)}) {
      for (const double tau : {1.5, M_PI / 2 - 0.01}) {
        WalkConfig config{n, (n - 1) / 2, phi, tau, 1.0};
        REQUIRE(pf_spectrum(config).leading_modulus < 1.0 - 1e-9);
      }
    }
  }
}

TEST_CASE("frozen unit-modulus census of the even ring at phase zero") {
  SECTION("nine disconnected modes at a generic period") {
    WalkConfig config{20, 10, 0.0, 1.0, 1.0};
    const PFSpectrum spectrum = pf_spectrum(config);
    int unit = 0;
    double worst_overlap = 0.0;
    for (int j = 0; j < 20; ++j)
      if (std::abs(spectrum.eigenvalues[j]) >= 1.0 - 1e-9) {
        ++unit;
        worst_overlap = std::max(worst_overlap, spectrum.overlaps[j]);
      }
    REQUIRE(unit == 9);
    // The frozen modes all sit in the sector the walker never populates.
    REQUIRE(worst_overlap < 1e-12);
  }

  SECTION("one extra frozen mode appears at the matching period") {
    WalkConfig config{20, 10, 0.0, M_PI / 2, 1.0};
    const PFSpectrum spectrum = pf_spectrum(config);
    int unit = 0;
    for (int j = 0; j < 20; ++j)
      if (std::abs(spectrum.eigenvalues[j]) >= 1.0 - 1e-9) ++unit;
    REQUIRE(unit == 10);
  }
}

TEST_CASE("the relaxation scale bounds how long detection takes to finish") {
  SECTION("a well-tuned period relaxes within a few hundred cycles") {
    WalkConfig config{21, 10, M_PI / 42, 1.4, 1.0e6};
    const AsymptoticScale scale = asymptotic_scale(config, false);
    REQUIRE_FALSE(scale.diverged);
    REQUIRE(std::isfinite(scale.t_asymptotic));

    const auto n = static_cast<std::size_t>(std::ceil(10.0 * scale.t_asymptotic));
    const auto record = first_detection_series(config, n);
    REQUIRE(record.cumulative.back() > 0.99);
  }

  SECTION("rapid measurement freezes the decay") {
    WalkConfig config{21, 10, M_PI / 42, 0.01, 1.0};
    const AsymptoticScale scale = asymptotic_scale(config, false);
    REQUIRE(scale.t_asymptotic > 1e3);
  }

  SECTION("zero-overlap frozen modes can be excluded from the scale") {
    WalkConfig config{20, 10, 0.0, 1.0, 1.0};
    const PFSpectrum spectrum = pf_spectrum(config);
    const AsymptoticScale with_unit = asymptotic_scale(spectrum, false);
    REQUIRE(with_unit.diverged);
    REQUIRE(std::isinf(with_unit.t_asymptotic));

    const AsymptoticScale bright_only = asymptotic_scale(spectrum, true);
    REQUIRE_FALSE(bright_only.diverged);
    REQUIRE(std::isfinite(bright_only.t_asymptotic));
    REQUIRE(bright_only.gap == Approx(1.0 - spectrum.subleading_modulus));
  }
}

TEST_CASE("the spectral survival sum is an estimate, not an identity") {
  WalkConfig config{4, 2, 0.0, 1.0, 100.0};
  const PFSpectrum spectrum = pf_spectrum(config);

  SECTION("at zero cycles the non-orthogonal modes overcount the state") {
    const SurvivalEstimate estimate = survival_spectral_estimate(spectrum, 0);
    REQUIRE(estimate.iterated == 1.0);
    REQUIRE(estimate.spectral == Approx(1.5013679656656196).margin(1e-9));
    REQUIRE(estimate.deviation > 0.4);
  }

  SECTION("once the decaying modes die the two calculations agree") {
    const SurvivalEstimate estimate = survival_spectral_estimate(spectrum, 30);
    REQUIRE(estimate.spectral < 1e-12);
    REQUIRE(estimate.iterated < 1e-12);
    REQUIRE(estimate.deviation < 1e-12);
  }

  SECTION("fully decaying configuration at long times") {
    WalkConfig bright{21, 10, M_PI / 42, 1.4, 1.0};
    const SurvivalEstimate estimate =
        survival_spectral_estimate(pf_spectrum(bright), 2000);
    REQUIRE(estimate.spectral < 1e-6);
    REQUIRE(estimate.iterated < 1e-6);
  }
}

TEST_CASE("the slowest mode sets the observed late-time decay rate") {
  for (const int n : {11, 15, 21}) {
    WalkConfig config{n, (n - 1) / 2, M_PI / (2.0 * n), 1.4, 1.0};
    const PFSpectrum spectrum = pf_spectrum(config);
    const AsymptoticScale scale = asymptotic_scale(spectrum, false);

    // Late enough that subdominant modes have died off; measure the local
    // log-slope of the survival over a window of attempts and compare with
    // the per-cycle contraction of the leading mode.
    const auto start = static_cast<std::size_t>(
        std::ceil(80.0 * scale.t_asymptotic / config.tau));
    const std::size_t window = 200;
    const auto record = first_detection_series(config, start + window);
    const double measured =
        std::log(record.survival[start + window - 1] /
                 record.survival[start - 1]) /
        static_cast<double>(window);
    const double predicted = 2.0 * std::log(spectrum.leading_modulus);
    REQUIRE(measured == Approx(predicted).epsilon(0.02));
  }
}
