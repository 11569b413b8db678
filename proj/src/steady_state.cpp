#include "wqed/steady_state.hpp"

#include <Eigen/Eigenvalues>

namespace wqed {

std::vector<int> active_indices(const SystemParams& p, const DressedBasis& basis,
                                const DissipationChannels& channels) {
  const auto jumps = jump_operators(p, channels);
  double scale = 0.0;
  std::vector<Mat3> dressed;
  dressed.reserve(jumps.size());
  for (const auto& j : jumps) {
    dressed.push_back(basis.unitary.adjoint() * j * basis.unitary);
    scale = std::max(scale, dressed.back().cwiseAbs().maxCoeff());
  }
  const double tol = 1e-14 * std::max(scale, 1e-300);

  std::vector<int> active;
  for (int mu = 0; mu < 3; ++mu) {
    bool coupled = false;
    for (const auto& j : dressed) {
      if (j.row(mu).cwiseAbs().maxCoeff() > tol || j.col(mu).cwiseAbs().maxCoeff() > tol) {
        coupled = true;
        break;
      }
    }
    if (coupled) active.push_back(mu);
  }
  if (active.empty()) throw SolverError("no radiative coupling: every state is dark");

  // The stationary problem is posed on the sector reachable from the bare
  // ground state; a dark sector holds whatever weight it started with, and
  // the solver assigns it zero.
  double ground_weight = 0.0;
  for (int mu : active) ground_weight += std::norm(basis.unitary(0, mu));
  if (ground_weight < 0.5) {
    throw SolverError("bare ground state is decoupled from every damped sector");
  }
  return active;
}

StationaryState solve_stationary_with_tensor(const DressedBasis& basis, const Super9& xi,
                                             const std::vector<int>& active) {
  const int na = static_cast<int>(active.size());
  const int n = na * na;

  const auto flat = [&](int a, int b) { return pair_index(active[a], active[b]); };

  Eigen::MatrixXcd mat(n, n);
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < na; ++b) {
      const int row = a * na + b;
      const Complex iw(0.0, basis.omega(active[a], active[b]));
      for (int c = 0; c < na; ++c) {
        for (int d = 0; d < na; ++d) {
          Complex v = -xi(flat(a, b), flat(c, d));
          if (a == c && b == d) v += iw;
          mat(row, c * na + d) = v;
        }
      }
    }
  }

  const Eigen::MatrixXcd stationary_rows = mat;  // for the residual check

  // Trace sum rule replaces the first population row; the population
  // equations are linearly dependent, so the system stays square.
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  for (int c = 0; c < na; ++c) {
    for (int d = 0; d < na; ++d) mat(0, c * na + d) = (c == d) ? 1.0 : 0.0;
  }
  rhs(0) = 1.0;

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(mat);
  Eigen::VectorXcd x = lu.solve(rhs);
  double defect = (mat * x - rhs).cwiseAbs().maxCoeff();
  if (!x.allFinite() || defect > 1e-8) {
    // Measure-zero degeneracies: fall back to least squares and keep the
    // residual for the caller to inspect.
    x = mat.completeOrthogonalDecomposition().solve(rhs);
    if (!x.allFinite()) {
      throw SolverError("stationary system singular (least-squares fallback failed)");
    }
    defect = (mat * x - rhs).cwiseAbs().maxCoeff();
  }

  StationaryState state;
  state.basis = basis;
  state.active = active;
  state.expectations = Vec9::Zero();
  Mat3 rho = Mat3::Zero();
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < na; ++b) {
      const Complex v = x(a * na + b);
      state.expectations[flat(a, b)] = v;
      rho(active[b], active[a]) = v;  // <sigma_{mu nu}> = rho_{nu mu}
    }
  }
  state.rho = {rho, Basis::dressed};

  // Stationarity defect of the original equations (replaced row included).
  const Eigen::VectorXcd stationary_defect = stationary_rows * x;
  state.residual = std::max(defect, stationary_defect.cwiseAbs().maxCoeff());
  return state;
}

StationaryState solve_stationary(const SystemParams& p, const DriveConfig& d,
                                 const DissipationChannels& channels) {
  const DressedBasis basis = dress(p, d);
  const Super9 xi =
      total_dissipation_tensor(p, transition_dipole(p).mat, basis.unitary, channels);
  StationaryState state =
      solve_stationary_with_tensor(basis, xi, active_indices(p, basis, channels));
  state.channels = channels;
  return state;
}

namespace {

Vec9 rk4_run(const Super9& l, const Vec9& v0, double t_final, double dt) {
  const long steps = std::max(1L, std::lround(t_final / dt));
  const double h = t_final / static_cast<double>(steps);
  Vec9 v = v0;
  for (long s = 0; s < steps; ++s) {
    const Vec9 k1 = l * v;
    const Vec9 k2 = l * (v + 0.5 * h * k1);
    const Vec9 k3 = l * (v + 0.5 * h * k2);
    const Vec9 k4 = l * (v + h * k3);
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return v;
}

}  // namespace

TaggedMatrix evolve_oracle(const SystemParams& p, const DriveConfig& d,
                           const TaggedMatrix& rho0_bare, double t_final, double dt,
                           const EvolveOptions& options) {
  if (rho0_bare.basis != Basis::bare) {
    throw ValidationError("evolve_oracle expects the initial state in the bare basis");
  }
  require_density_matrix(rho0_bare.mat);
  if (!(t_final > 0) || !(dt > 0)) throw ValidationError("t_final and dt must be positive");

  const Mat3 h = rotating_hamiltonian(p, d).mat;
  const Super9 l = liouvillian(h, jump_operators(p, options.channels));
  const Vec9 v0 = vectorize(rho0_bare.mat);

  // Start inside the RK4 stability region, then halve until the end state
  // stops moving; running dt and dt/2 doubles as the built-in accuracy check.
  double scale = h.cwiseAbs().maxCoeff();
  scale = std::max({scale, to_angular(p.gamma10), to_angular(p.gamma21), 1e-6});
  double step = std::min(dt, 0.05 / scale);

  Vec9 coarse = rk4_run(l, v0, t_final, step);
  for (int halving = 0; halving < options.max_halvings; ++halving) {
    const Vec9 fine = rk4_run(l, v0, t_final, step / 2.0);
    const double diff = (fine - coarse).cwiseAbs().maxCoeff();
    if (diff < options.refine_tol) {
      const Mat3 rho = unvectorize(fine);
      const double drift = std::abs(rho.trace().real() - 1.0);
      if (drift > 1e-9) throw SolverError("oracle lost trace normalization");
      return {rho, Basis::bare};
    }
    coarse = fine;
    step /= 2.0;
  }
  throw SolverError("oracle step size did not converge under halving");
}

TaggedMatrix evolve_oracle_to_steady(const SystemParams& p, const DriveConfig& d,
                                     const EvolveOptions& options) {
  p.validate();
  if (p.gamma10 <= 0) throw ValidationError("relaxation horizon undefined for gamma10 = 0");
  Mat3 ground = Mat3::Zero();
  ground(0, 0) = 1.0;
  const double t_final = 50.0 / to_angular(p.gamma10);
  return evolve_oracle(p, d, {ground, Basis::bare}, t_final, t_final, options);
}

}  // namespace wqed
