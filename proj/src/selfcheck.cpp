#include "wqed/selfcheck.hpp"

#include <random>

#include "wqed/response.hpp"
#include "wqed/twolevel.hpp"

namespace wqed {

bool CheckReport::all_passed() const {
  for (const auto& l : lines)
    if (!l.passed) return false;
  return true;
}

namespace {

struct RandomPoint {
  SystemParams params;
  DriveConfig drive;
};

std::vector<RandomPoint> random_points(const SystemParams& base, int count,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<RandomPoint> points;
  points.reserve(count);
  for (int i = 0; i < count; ++i) {
    RandomPoint pt;
    pt.params = base;
    pt.params.gamma10 = 0.02 + 0.06 * u(rng);
    pt.params.gamma21 = pt.params.gamma10 * (1.0 + 2.0 * u(rng));
    pt.params.omega21 = pt.params.omega10 - (0.2 + 0.8 * u(rng));
    const int mode = i % 3;
    double omega_d = pt.params.omega20() / 2.0;
    if (mode == 1) omega_d = pt.params.omega10;
    if (mode == 2) omega_d = pt.params.omega10 - 0.5 + u(rng);
    pt.drive = DriveConfig{omega_d, AmplitudeMode::rabi10, 0.05 + 1.95 * u(rng), std::nullopt};
    points.push_back(pt);
  }
  return points;
}

CheckLine check_oracle_equivalence(const SystemParams& base, const CheckOptions& options) {
  CheckLine line{"stationary solver vs time-evolution oracle", false, 0.0, 1e-6};
  const auto points = random_points(base, options.n_random, options.seed);
  double worst = 0.0;
  for (const auto& pt : points) {
    const DressedBasis basis = dress(pt.params, pt.drive);
    Super9 xi = total_dissipation_tensor(pt.params, transition_dipole(pt.params).mat,
                                         basis.unitary, {});
    if (options.corrupt_xi) {
      xi(pair_index(0, 1), pair_index(0, 1)) = -xi(pair_index(0, 1), pair_index(0, 1));
    }
    const StationaryState stationary =
        solve_stationary_with_tensor(basis, xi, active_indices(pt.params, basis, {}));
    const TaggedMatrix evolved = evolve_oracle_to_steady(pt.params, pt.drive);
    const Mat3 evolved_dressed =
        basis.unitary.adjoint() * evolved.mat * basis.unitary;
    worst = std::max(worst, (evolved_dressed - stationary.rho.mat).cwiseAbs().maxCoeff());
  }
  line.worst = worst;
  line.passed = worst < line.tolerance;
  return line;
}

CheckLine check_two_tone(const SystemParams& base, const CheckOptions& options) {
  CheckLine line{"linear response vs two-tone oracle", false, 0.0, 1e-3};
  std::mt19937_64 rng(options.seed + 17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  const int count = std::max(4, options.n_random / 4);
  for (int i = 0; i < count; ++i) {
    SystemParams p = base;
    DriveConfig d{p.omega20() / 2.0, AmplitudeMode::rabi10, 0.2 + 0.6 * u(rng), std::nullopt};
    const DressedBasis basis = dress(p, d);
    double omega_p;
    if (i % 2 == 0) {
      const auto table = sideband_frequencies(basis);
      omega_p = table[i % 6].frequency_ghz;
    } else {
      omega_p = d.omega_d - 1.2 + 2.4 * u(rng);
    }
    if (std::abs(omega_p - d.omega_d) < 0.01) omega_p = d.omega_d + 0.01;
    const Complex linear = transmission(p, d, omega_p).t;
    const Complex oracle = two_tone_oracle(p, d, ProbeConfig{omega_p, std::nullopt});
    worst = std::max(worst, std::abs(std::abs(linear) - std::abs(oracle)));
  }
  line.worst = worst;
  line.passed = worst < line.tolerance;
  return line;
}

CheckLine check_sideband_closed_form(const SystemParams& base) {
  // Gap normalized to the sideband contrast scale: the reduction drops the
  // inter-component couplings of the full response, a few 1e-3 on |t|-1,
  // which dominate the faintest sidebands.
  CheckLine line{"sideband closed form vs full response", false, 0.0, 0.10};
  const DriveConfig d{base.omega20() / 2.0, AmplitudeMode::rabi10, 0.5, std::nullopt};
  const StationaryState stationary = solve_stationary(base, d);
  const Mat3 st_dressed = to_dressed(transition_dipole(base), stationary.basis);
  const Super9 xi = total_dissipation_tensor(base, transition_dipole(base).mat,
                                             stationary.basis.unitary, {});
  const SidebandTable table = sideband_frequencies(stationary.basis);
  constexpr double contrast_floor = 0.025;
  double worst = 0.0;
  for (const auto& s : table) {
    const Complex closed =
        sideband_transmission(stationary, st_dressed, xi, s.lower, s.upper);
    const Complex full = transmission(base, d, s.frequency_ghz, stationary).t;
    const double a = std::abs(closed) - 1.0;
    const double b = std::abs(full) - 1.0;
    worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), contrast_floor));
  }
  line.worst = worst;
  line.passed = worst < line.tolerance;
  return line;
}

CheckLine check_two_level_reduction(const SystemParams& base) {
  CheckLine line{"exact two-level limit vs Bloch closed form", false, 0.0, 1e-10};
  SystemParams p = base;
  p.gamma21 = 0.0;
  p.gamma10_nr = 0.0005;
  p.gamma_phi = 0.001;
  const BlochRates rates = BlochRates::from_params(p);
  const DissipationChannels channels{true, true};
  double worst = 0.0;
  for (double rabi : {1e-4, 0.02, 0.1, 0.3}) {
    for (double detuning : {0.0, -0.05, 0.08}) {
      const DriveConfig d{p.omega10 + detuning, AmplitudeMode::rabi10, rabi, std::nullopt};
      const Complex full = drive_self_transmission(p, d, channels);
      const Complex closed =
          t_closed_form(rates, to_angular(d.omega_d - p.omega10),
                        bloch_rabi_from_rabi10(to_angular(rabi)));
      worst = std::max(worst, std::abs(full - closed));
    }
  }
  line.worst = worst;
  line.passed = worst < line.tolerance;
  return line;
}

}  // namespace

CheckReport run_selfcheck(const SystemParams& p, const CheckOptions& options) {
  p.validate();
  CheckReport report;
  report.lines.push_back(check_oracle_equivalence(p, options));
  report.lines.push_back(check_two_tone(p, options));
  report.lines.push_back(check_sideband_closed_form(p));
  report.lines.push_back(check_two_level_reduction(p));
  return report;
}

}  // namespace wqed
