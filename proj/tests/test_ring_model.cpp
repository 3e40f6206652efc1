#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "ringwalk/ring_model.hpp"
#include "test_support.hpp"

using namespace ringwalk;
using Catch::Approx;

namespace {
constexpr Complex kI{0.0, 1.0};
}

TEST_CASE("hamiltonian has the chiral nearest-neighbour pattern") {
  SECTION("zero phase gives the plain cycle adjacency matrix") {
    const ComplexMatrix h = build_hamiltonian(4, 0.0);
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected(1, 0) = expected(0, 1) = 1.0;
    expected(2, 1) = expected(1, 2) = 1.0;
    expected(3, 2) = expected(2, 3) = 1.0;
    expected(0, 3) = expected(3, 0) = 1.0;
    REQUIRE((h - expected).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("phases sit on the directed hops") {
    const ComplexMatrix h = build_hamiltonian(3, M_PI / 3);
    REQUIRE(std::abs(h(1, 0) - std::exp(-kI * (M_PI / 3))) < 1e-15);
    REQUIRE(std::abs(h(0, 1) - std::exp(+kI * (M_PI / 3))) < 1e-15);
    REQUIRE((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  }

  SECTION("flipping the phase conjugates every hop") {
    // Each matrix is hermitian on its own, so the chirality flip shows up as
    // an elementwise conjugation — equivalently, a transpose.
    const ComplexMatrix h_plus = build_hamiltonian(20, M_PI / 40);
    const ComplexMatrix h_minus = build_hamiltonian(20, -M_PI / 40);
    REQUIRE((h_plus - h_minus.conjugate()).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((h_plus - h_minus.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("rings smaller than three sites are rejected") {
    REQUIRE_THROWS_AS(build_hamiltonian(2, 0.0), std::invalid_argument);
  }
}

TEST_CASE("hamiltonian is hermitian for sampled parameters") {
  testing::ConfigSampler sampler(101);
  for (int trial = 0; trial < 20; ++trial) {
    const WalkConfig config = sampler.next();
    const ComplexMatrix h = build_hamiltonian(config.num_sites, config.phi);
    REQUIRE((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("shifting all site labels by one leaves the hamiltonian unchanged") {
  for (const auto& [n, phi] : {std::pair{5, 0.3}, {8, -0.2}, {21, M_PI / 42}}) {
    const ComplexMatrix h = build_hamiltonian(n, phi);
    ComplexMatrix shift = ComplexMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) shift((j + 1) % n, j) = 1.0;
    const ComplexMatrix conjugated = shift * h * shift.adjoint();
    REQUIRE((conjugated - h).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("closed-form spectrum matches the cosine formula") {
  const Spectrum s = analytic_spectrum(4, 0.0);
  REQUIRE(s.eigenvalues[0] == Approx(2.0).margin(1e-15));
  REQUIRE(s.eigenvalues[1] == Approx(0.0).margin(1e-15));
  REQUIRE(s.eigenvalues[2] == Approx(-2.0).margin(1e-15));
  REQUIRE(s.eigenvalues[3] == Approx(0.0).margin(1e-15));
}

TEST_CASE("closed-form eigenpairs satisfy the eigenvalue equation") {
  SECTION("odd ring with a generic phase") {
    const int n = 21;
    const double phi = M_PI / 42;
    const ComplexMatrix h = build_hamiltonian(n, phi);
    const Spectrum s = analytic_spectrum(n, phi);
    for (int j = 0; j < n; ++j) {
      const double residual =
          (h * s.eigenvectors.col(j) - s.eigenvalues[j] * s.eigenvectors.col(j))
              .norm();
      REQUIRE(residual < 1e-10);
    }
  }

  SECTION("sampled parameters, plus orthonormality") {
    testing::ConfigSampler sampler(202);
    for (int trial = 0; trial < 20; ++trial) {
      const WalkConfig config = sampler.next();
      const ComplexMatrix h = build_hamiltonian(config.num_sites, config.phi);
      const Spectrum s = analytic_spectrum(config.num_sites, config.phi);
      const double residual =
          (h * s.eigenvectors - s.eigenvectors * s.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>())
              .cwiseAbs()
              .maxCoeff();
      REQUIRE(residual < 1e-10);
      const ComplexMatrix gram = s.eigenvectors.adjoint() * s.eigenvectors;
      REQUIRE((gram - ComplexMatrix::Identity(config.num_sites, config.num_sites))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("even ring at zero phase pairs all levels but two") {
  const Spectrum s = analytic_spectrum(20, 0.0);
  REQUIRE(s.eigenvalues[0] == Approx(2.0).margin(1e-14));
  REQUIRE(s.eigenvalues[10] == Approx(-2.0).margin(1e-14));
  for (int j = 1; j <= 9; ++j)
    REQUIRE(std::abs(s.eigenvalues[j] - s.eigenvalues[20 - j]) < 1e-12);
}

TEST_CASE("propagator at zero time is the identity") {
  const ComplexMatrix u = propagator(7, 0.2, 0.0);
  REQUIRE((u - ComplexMatrix::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("propagator composes over time and inverts") {
  SECTION("forward then backward is the identity") {
    const ComplexMatrix u_fwd = propagator(4, 0.0, M_PI);
    const ComplexMatrix u_bwd = propagator(4, 0.0, -M_PI);
    REQUIRE((u_fwd * u_bwd - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() <
            1e-12);
  }

  SECTION("two segments equal their sum") {
    const Spectrum s = analytic_spectrum(9, 0.17);
    const ComplexMatrix lhs = propagator(s, 1.1) * propagator(s, 0.7);
    const ComplexMatrix rhs = propagator(s, 1.8);
    REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("propagator matches a series-expansion exponential") {
  const int n = 6;
  const double phi = M_PI / 12, t = 1.3;
  const ComplexMatrix h = build_hamiltonian(n, phi);
  const ComplexMatrix expected = testing::expm_oracle(-kI * t * h);
  const ComplexMatrix u = propagator(n, phi, t);
  REQUIRE((u - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("propagator stays unitary for sampled times") {
  testing::ConfigSampler sampler(303);
  for (int trial = 0; trial < 20; ++trial) {
    const WalkConfig config = sampler.next();
    const ComplexMatrix u = propagator(config.num_sites, config.phi, config.tau);
    REQUIRE((u.adjoint() * u -
             ComplexMatrix::Identity(config.num_sites, config.num_sites))
                .cwiseAbs()
                .maxCoeff() < 1e-10);
  }
}

TEST_CASE("transfer probability starts at zero and follows the mode sum") {
  WalkConfig config{21, 10, M_PI / 42, 1.0, 10.0};
  REQUIRE(unitary_transfer_probability(config, 0.0) < 1e-28);

  // The O(N) mode-sum evaluation must agree with reading the probability off
  // the full propagator matrix.
  const double via_sum = unitary_transfer_probability(config, 5.0);
  const ComplexMatrix u = propagator(config.num_sites, config.phi, 5.0);
  REQUIRE(std::abs(via_sum - std::norm(u(config.target, 0))) < 1e-12);
  REQUIRE(via_sum >= 0.0);
  REQUIRE(via_sum <= 1.0);
}
