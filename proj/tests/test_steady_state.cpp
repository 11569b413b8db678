#include <doctest.h>

#include <random>

#include "wqed/steady_state.hpp"
#include "wqed/twolevel.hpp"

using namespace wqed;

namespace {

SystemParams paper_params() {
  SystemParams p;
  p.omega10 = 7.558;
  p.omega21 = 7.070;
  p.gamma10 = 0.040;
  p.gamma21 = 0.080;
  return p;
}

DriveConfig drive_at(double omega_d, double rabi10) {
  return DriveConfig{omega_d, AmplitudeMode::rabi10, rabi10, std::nullopt};
}

TaggedMatrix basis_state(int j) {
  Mat3 rho = Mat3::Zero();
  rho(j, j) = 1.0;
  return {rho, Basis::bare};
}

}  // namespace

TEST_CASE("zero drive relaxes to the bare ground state") {
  const SystemParams p = paper_params();
  for (double omega_d : {7.314, 7.558, 7.0}) {
    const StationaryState s = solve_stationary(p, drive_at(omega_d, 0.0));
    const Mat3 rho_bare =
        s.basis.unitary * s.rho.mat * s.basis.unitary.adjoint();
    CHECK(std::abs(rho_bare(0, 0).real() - 1.0) < 1e-10);
    CHECK(rho_bare.cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s.residual < 1e-10);
  }
}

TEST_CASE("stationary state is a valid density matrix with tiny residual") {
  const SystemParams p = paper_params();
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double omega_d = 7.0 + u(rng);
    const double rabi = 2.0 * u(rng);
    const StationaryState s = solve_stationary(p, drive_at(omega_d, rabi));
    CHECK(s.residual < 1e-10);
    CHECK_NOTHROW(require_density_matrix(s.rho.mat, 1e-10, -1e-10));
    // Hermiticity in expectation form: <s_mn>* = <s_nm>.
    for (int mu = 0; mu < 3; ++mu)
      for (int nu = 0; nu < 3; ++nu)
        CHECK(std::abs(std::conj(s.sigma(mu, nu)) - s.sigma(nu, mu)) < 1e-12);
  }
}

TEST_CASE("strong symmetric drive approaches the maximally mixed state") {
  const SystemParams p = paper_params();
  const StationaryState s = solve_stationary(p, drive_at(p.omega20() / 2.0, 2.0));
  for (int mu = 0; mu < 3; ++mu) {
    CHECK(std::abs(s.population(mu) - 1.0 / 3.0) < 0.05);
    for (int nu = 0; nu < 3; ++nu) {
      if (mu != nu) CHECK(std::abs(s.sigma(mu, nu)) < 0.02);
    }
  }
}

TEST_CASE("population ordering and growing mixedness under the symmetric drive") {
  const SystemParams p = paper_params();
  const double omega_d = p.omega20() / 2.0;
  double previous_purity = 1.0 + 1e-12;
  for (int i = 0; i <= 40; ++i) {
    const double rabi = 2.0 * i / 40.0;
    const StationaryState s = solve_stationary(p, drive_at(omega_d, rabi));
    const double purity = (s.rho.mat * s.rho.mat).trace().real();
    CHECK(purity <= previous_purity + 1e-9);
    previous_purity = purity;
    if (rabi >= 0.3) {
      CHECK(s.population(2) > s.population(1));
      CHECK(s.population(1) > s.population(0));
    }
  }
}

TEST_CASE("weak drive leaves the emitter in a pure state") {
  const SystemParams p = paper_params();
  const StationaryState s = solve_stationary(p, drive_at(p.omega20() / 2.0, 1e-4));
  const double purity = (s.rho.mat * s.rho.mat).trace().real();
  CHECK(purity > 1.0 - 1e-6);
}

TEST_CASE("exact two-level limit reproduces the saturation formula") {
  SystemParams p = paper_params();
  p.gamma21 = 0.0;
  for (double rabi : {0.005, 0.02, 0.08, 0.3}) {
    const StationaryState s = solve_stationary(p, drive_at(p.omega10, rabi));
    // Resonant ideal two-level: n = s/(2(1+s)) with the Bloch Rabi frequency.
    const double omega = bloch_rabi_from_rabi10(to_angular(rabi));
    const double g10 = to_angular(p.gamma10);
    const double sat = 2.0 * omega * omega / (g10 * g10);
    const double expected = sat / (2.0 * (1.0 + sat));
    double excited = 0.0;  // bare |1> population
    const Mat3 rho_bare = s.basis.unitary * s.rho.mat * s.basis.unitary.adjoint();
    excited = rho_bare(1, 1).real();
    CHECK(excited == doctest::Approx(expected).epsilon(1e-8));
    CHECK(std::abs(rho_bare(2, 2)) < 1e-12);  // dark level stays empty
  }
}

TEST_CASE("oracle: exponential decay of the bare levels without drive") {
  const SystemParams p = paper_params();
  const DriveConfig d = drive_at(7.314, 0.0);
  const double t = 6.0;
  const TaggedMatrix from2 = evolve_oracle(p, d, basis_state(2), t, 0.01);
  CHECK(std::abs(from2.mat(2, 2).real() - std::exp(-to_angular(p.gamma21) * t)) < 1e-8);
  const TaggedMatrix from1 = evolve_oracle(p, d, basis_state(1), t, 0.01);
  CHECK(std::abs(from1.mat(1, 1).real() - std::exp(-to_angular(p.gamma10) * t)) < 1e-8);

  // Cascade through the middle level, solved analytically.
  const double g10 = to_angular(p.gamma10);
  const double g21 = to_angular(p.gamma21);
  const double expected1 = g21 / (g10 - g21) * (std::exp(-g21 * t) - std::exp(-g10 * t));
  CHECK(std::abs(from2.mat(1, 1).real() - expected1) < 1e-8);
}

TEST_CASE("oracle preserves trace and positivity along the trajectory") {
  const SystemParams p = paper_params();
  const DriveConfig d = drive_at(p.omega20() / 2.0, 0.8);
  Mat3 rho = Mat3::Zero();
  rho(0, 0) = 1.0;
  double t_accum = 0.0;
  for (int leg = 0; leg < 8; ++leg) {
    const TaggedMatrix out = evolve_oracle(p, d, {rho, Basis::bare}, 3.0, 0.01);
    rho = out.mat;
    t_accum += 3.0;
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-9);
    Eigen::SelfAdjointEigenSolver<Mat3> es(rho, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-9);
  }
  CHECK(t_accum == doctest::Approx(24.0));
}

TEST_CASE("oracle equivalence: long-time evolution matches the stationary solver") {
  const SystemParams p = paper_params();
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    SystemParams q = p;
    q.gamma10 = 0.02 + 0.06 * u(rng);
    q.gamma21 = 2.0 * q.gamma10;
    const double omega_d = (trial % 2 == 0) ? q.omega20() / 2.0 : q.omega10;
    const DriveConfig d = drive_at(omega_d, 0.1 + 1.5 * u(rng));
    const StationaryState s = solve_stationary(q, d);
    const TaggedMatrix evolved = evolve_oracle_to_steady(q, d);
    const Mat3 evolved_dressed =
        s.basis.unitary.adjoint() * evolved.mat * s.basis.unitary;
    CHECK((evolved_dressed - s.rho.mat).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("oracle validates its inputs") {
  const SystemParams p = paper_params();
  const DriveConfig d = drive_at(7.314, 0.1);
  Mat3 bad = Mat3::Zero();
  bad(0, 0) = 0.7;  // trace != 1
  CHECK_THROWS_AS(evolve_oracle(p, d, {bad, Basis::bare}, 1.0, 0.01), ValidationError);
  CHECK_THROWS_AS(evolve_oracle(p, d, basis_state(0), -1.0, 0.01), ValidationError);
}

TEST_CASE("loss channels shift the two-level saturation as in the Bloch model") {
  SystemParams p = paper_params();
  p.gamma21 = 0.0;
  p.gamma10_nr = 0.0005;
  p.gamma_phi = 0.001;
  const DissipationChannels channels{true, true};
  const BlochRates rates = BlochRates::from_params(p);
  for (double rabi : {0.01, 0.1}) {
    for (double detuning : {0.0, 0.06}) {
      const DriveConfig d = drive_at(p.omega10 + detuning, rabi);
      const StationaryState s = solve_stationary(p, d, channels);
      const BlochSteady expected = bloch_steady(rates, to_angular(d.omega_d - p.omega10),
                                                bloch_rabi_from_rabi10(to_angular(rabi)));
      const Mat3 rho_bare = s.basis.unitary * s.rho.mat * s.basis.unitary.adjoint();
      CHECK(std::abs(rho_bare(1, 1).real() - expected.sigma11) < 1e-8);
      // <sigma01> = rho_10
      CHECK(std::abs(rho_bare(1, 0) - expected.sigma01) < 1e-8);
    }
  }
}
