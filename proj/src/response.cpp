#include "wqed/response.hpp"

namespace wqed {

namespace {

Complex sigma_t_expectation(const Mat3& sigma_t_dressed, const Vec9& expectations) {
  Complex sum = 0.0;
  for (int mu = 0; mu < 3; ++mu)
    for (int nu = 0; nu < 3; ++nu)
      sum += sigma_t_dressed(mu, nu) * expectations[pair_index(mu, nu)];
  return sum;
}

// Response system on the active sector:
//   [i(w_ab + dw) - xi] x = i F (zeta <sigma>_s).
// At dw = 0 the matrix is the (singular) stationary one; the physical
// response there is the drive-amplitude derivative, singled out by its zero
// trace, so a trace row replaces the first population row in that case.
Eigen::VectorXcd solve_response(const DressedBasis& basis, const Super9& xi,
                                const Super9& zeta, const Vec9& stationary,
                                const std::vector<int>& active, double delta,
                                double amplitude) {
  const int na = static_cast<int>(active.size());
  const int n = na * na;
  const auto flat = [&](int a, int b) { return pair_index(active[a], active[b]); };

  const Vec9 source = zeta * stationary;

  Eigen::MatrixXcd mat(n, n);
  Eigen::VectorXcd rhs(n);
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < na; ++b) {
      const int row = a * na + b;
      const Complex iw(0.0, basis.omega(active[a], active[b]) + delta);
      for (int c = 0; c < na; ++c) {
        for (int d = 0; d < na; ++d) {
          Complex v = -xi(flat(a, b), flat(c, d));
          if (a == c && b == d) v += iw;
          mat(row, c * na + d) = v;
        }
      }
      rhs(row) = Complex(0.0, amplitude) * source[flat(a, b)];
    }
  }

  double scale = std::abs(delta);
  for (int a = 1; a < na; ++a) scale = std::max(scale, std::abs(basis.omega(active[a], active[0])));
  scale = std::max(scale, xi.cwiseAbs().maxCoeff());

  if (std::abs(delta) < 1e-12 * std::max(scale, 1e-300)) {
    for (int c = 0; c < na; ++c) {
      for (int d = 0; d < na; ++d) mat(0, c * na + d) = (c == d) ? 1.0 : 0.0;
    }
    rhs(0) = 0.0;
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(mat);
  Eigen::VectorXcd x = lu.solve(rhs);
  const double defect = (mat * x - rhs).cwiseAbs().maxCoeff();
  if (!x.allFinite() || defect > 1e-8 * std::max(rhs.cwiseAbs().maxCoeff(), 1e-300)) {
    x = mat.completeOrthogonalDecomposition().solve(rhs);
    if (!x.allFinite()) throw SolverError("linear-response system singular");
  }
  return x;
}

}  // namespace

Vec9 probe_response(const SystemParams& p, const DriveConfig& d, double omega_p_ghz,
                    double probe_amplitude, const StationaryState& stationary) {
  if (!(probe_amplitude > 0)) throw ValidationError("probe amplitude must be positive");
  const DressedBasis& basis = stationary.basis;
  const Mat3 st_dressed = to_dressed(transition_dipole(p), basis);
  const Super9 xi =
      total_dissipation_tensor(p, transition_dipole(p).mat, basis.unitary, stationary.channels);
  const Super9 zeta = zeta_tensor(st_dressed);
  const double delta = to_angular(omega_p_ghz - d.omega_d);

  const Eigen::VectorXcd x = solve_response(basis, xi, zeta, stationary.expectations,
                                            stationary.active, delta, probe_amplitude);
  Vec9 full = Vec9::Zero();
  const int na = static_cast<int>(stationary.active.size());
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < na; ++b)
      full[pair_index(stationary.active[a], stationary.active[b])] = x(a * na + b);
  return full;
}

TransmissionPoint transmission(const SystemParams& p, const DriveConfig& d,
                               double omega_p_ghz, const StationaryState& stationary) {
  const double f = ProbeConfig{omega_p_ghz, std::nullopt}.field_amplitude(p);
  const Vec9 response = probe_response(p, d, omega_p_ghz, f, stationary);
  const Mat3 st_dressed = to_dressed(transition_dipole(p), stationary.basis);
  const Complex t = 1.0 - Complex(0.0, 1.0) * sigma_t_expectation(st_dressed, response) / f;
  return {omega_p_ghz, t, d.rabi10(p)};
}

TransmissionPoint transmission(const SystemParams& p, const DriveConfig& d,
                               double omega_p_ghz) {
  return transmission(p, d, omega_p_ghz, solve_stationary(p, d));
}

Complex sideband_transmission(const StationaryState& stationary, const Mat3& sigma_t_dressed,
                              const Super9& xi, DressedLabel lower, DressedLabel upper) {
  const int mu = static_cast<int>(lower);
  const int nu = static_cast<int>(upper);
  if (mu == nu) {
    throw ValidationError("sideband_transmission requires two distinct dressed states");
  }
  const Complex xi_diag = xi(pair_index(mu, nu), pair_index(mu, nu));
  if (!(xi_diag.real() > 0)) {
    throw SolverError("sideband damping is not positive; closed form undefined");
  }
  const double inversion = stationary.population(nu) - stationary.population(mu);
  return 1.0 + std::norm(sigma_t_dressed(mu, nu)) * inversion / xi_diag;
}

Complex sideband_transmission(const SystemParams& p, const DriveConfig& d,
                              DressedLabel lower, DressedLabel upper) {
  const StationaryState stationary = solve_stationary(p, d);
  const Mat3 st_dressed = to_dressed(transition_dipole(p), stationary.basis);
  const Super9 xi =
      total_dissipation_tensor(p, transition_dipole(p).mat, stationary.basis.unitary, {});
  return sideband_transmission(stationary, st_dressed, xi, lower, upper);
}

SidebandTable classified_sidebands(const StationaryState& stationary) {
  SidebandTable table = sideband_frequencies(stationary.basis);
  for (auto& s : table) {
    const double inversion = stationary.population(static_cast<int>(s.upper)) -
                             stationary.population(static_cast<int>(s.lower));
    if (inversion > 1e-12) {
      s.kind = Sideband::Kind::gain;
    } else if (inversion < -1e-12) {
      s.kind = Sideband::Kind::loss;
    }
  }
  return table;
}

Complex drive_self_transmission(const SystemParams& p, const DriveConfig& d,
                                const DissipationChannels& channels) {
  const double e = d.field_amplitude(p);
  if (!(e > 0)) throw ValidationError("drive self-transmission undefined at zero drive");
  const StationaryState stationary = solve_stationary(p, d, channels);
  const Mat3 st_dressed = to_dressed(transition_dipole(p), stationary.basis);
  return 1.0 - Complex(0.0, 1.0) * sigma_t_expectation(st_dressed, stationary.expectations) / e;
}

namespace {

struct Demodulator {
  double delta = 0.0;  // angular beat frequency
  std::vector<double> times;
  std::vector<Complex> values;

  // Least-squares projection onto {1, exp(-i dw t), exp(+i dw t)}.
  Complex probe_component() const {
    Eigen::Matrix3cd gram = Eigen::Matrix3cd::Zero();
    Eigen::Vector3cd proj = Eigen::Vector3cd::Zero();
    for (size_t i = 0; i < times.size(); ++i) {
      const Complex w = std::polar(1.0, -delta * times[i]);
      const Eigen::Vector3cd basis(Complex(1.0, 0.0), w, std::conj(w));
      gram += basis.conjugate() * basis.transpose();
      proj += basis.conjugate() * values[i];
    }
    const Eigen::Vector3cd coeff = gram.fullPivLu().solve(proj);
    return coeff(1);
  }
};

}  // namespace

Complex two_tone_oracle(const SystemParams& p, const DriveConfig& d,
                        const ProbeConfig& probe, const TwoToneOptions& options) {
  p.validate();
  d.validate(p);
  const double f = probe.field_amplitude(p);
  if (!(f > 0)) throw ValidationError("probe amplitude must be positive");
  if (f * f > 1e-4 * to_angular(p.gamma10)) {
    throw ValidationError("probe amplitude outside the linear regime (F^2 <= 1e-4 gamma10)");
  }

  const double delta = to_angular(probe.omega_p - d.omega_d);
  const Mat3 st = transition_dipole(p).mat;

  if (delta == 0.0) {
    // Degenerate with the drive: the lock-in cannot separate the probe from
    // the drive tone there, so evaluate the limit from a 1 MHz offset (the
    // response varies on the scale of the linewidths, ~40 MHz).
    ProbeConfig shifted = probe;
    shifted.omega_p += 1e-3;
    return two_tone_oracle(p, d, shifted, options);
  }

  const Mat3 h0 = rotating_hamiltonian(p, d).mat;
  const Super9 l0 = liouvillian(h0, jump_operators(p, options.channels));
  const Super9 raise = commutator_superop(st.adjoint());
  const Super9 lower = commutator_superop(st);

  // Weight vector for <sigma_t> = Tr(rho sigma_t) on the vectorized state.
  Vec9 weight = Vec9::Zero();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) weight(3 * c + r) = st(c, r);

  const StationaryState start = solve_stationary(p, d, options.channels);
  const Mat3 rho0 =
      start.basis.unitary * start.rho.mat * start.basis.unitary.adjoint();
  const Vec9 v0 = vectorize(rho0);

  const double beat = two_pi / std::abs(delta);
  const double settle =
      options.settle_time > 0 ? options.settle_time : 50.0 / to_angular(p.gamma10);
  const int beats = std::max(20, static_cast<int>(std::lround(options.window_beats)));
  const double window = beats * beat;
  if (window > 1e7) {
    throw SolverError("demodulation window impractically long; probe too close to the drive");
  }

  double scale = h0.cwiseAbs().maxCoeff();
  scale = std::max({scale, to_angular(p.gamma10), to_angular(p.gamma21), std::abs(delta), 1e-6});

  constexpr int samples_per_beat = 32;
  const double sample_dt = beat / samples_per_beat;

  const auto run = [&](int substeps) {
    const double h = sample_dt / substeps;
    const auto l_at = [&](double time) {
      const Complex ph = std::polar(f, -delta * time);
      return Super9(l0 + ph * raise + std::conj(ph) * lower);
    };
    const auto rk4_step = [&](Vec9& v, double time) {
      const Super9 la = l_at(time);
      const Super9 lb = l_at(time + 0.5 * h);
      const Super9 lc = l_at(time + h);
      const Vec9 k1 = la * v;
      const Vec9 k2 = lb * (v + 0.5 * h * k1);
      const Vec9 k3 = lb * (v + 0.5 * h * k2);
      const Vec9 k4 = lc * (v + h * k3);
      v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };

    Vec9 v = v0;
    double time = 0.0;
    const long settle_steps = std::lround(std::ceil(settle / h));
    for (long s = 0; s < settle_steps; ++s, time += h) rk4_step(v, time);

    Demodulator demod;
    demod.delta = delta;
    const int n_samples = beats * samples_per_beat;
    demod.times.reserve(n_samples);
    demod.values.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
      demod.times.push_back(time);
      demod.values.push_back(weight.transpose() * v);
      for (int s = 0; s < substeps; ++s, time += h) rk4_step(v, time);
    }
    return 1.0 - Complex(0.0, 1.0) * demod.probe_component() / f;
  };

  int substeps = std::max(1, static_cast<int>(std::ceil(sample_dt * scale / 0.1)));
  Complex coarse = run(substeps);
  for (int halving = 0; halving < options.max_halvings; ++halving) {
    substeps *= 2;
    const Complex fine = run(substeps);
    if (std::abs(fine - coarse) < options.refine_tol) return fine;
    coarse = fine;
  }
  throw SolverError("two-tone oracle did not converge under step halving");
}

}  // namespace wqed
