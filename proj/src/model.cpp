#include "wqed/model.hpp"

#include <unsupported/Eigen/KroneckerProduct>

namespace wqed {

TaggedMatrix rotating_hamiltonian(const SystemParams& p, const DriveConfig& d) {
  p.validate();
  d.validate(p);
  const double e = d.field_amplitude(p);
  const double g10 = to_angular(p.gamma10);
  const double g21 = to_angular(p.gamma21);

  Mat3 h = Mat3::Zero();
  h(1, 1) = to_angular(p.omega10 - d.omega_d);
  h(2, 2) = to_angular(p.omega20() - 2.0 * d.omega_d);
  h(0, 1) = h(1, 0) = e * std::sqrt(g10 / 2.0);
  h(1, 2) = h(2, 1) = e * std::sqrt(g21 / 2.0);
  // (0,2) stays exactly zero: parity selection rule.
  return {h, Basis::bare};
}

TaggedMatrix transition_dipole(const SystemParams& p) {
  p.validate();
  Mat3 st = Mat3::Zero();
  st(0, 1) = std::sqrt(to_angular(p.gamma10) / 2.0);
  st(1, 2) = std::sqrt(to_angular(p.gamma21) / 2.0);
  return {st, Basis::bare};
}

Mat3 nonradiative_jump(const SystemParams& p) {
  Mat3 j = Mat3::Zero();
  j(0, 1) = std::sqrt(to_angular(p.gamma10_nr));
  return j;
}

Mat3 dephasing_jump(const SystemParams& p) {
  Mat3 j = Mat3::Zero();
  j(1, 1) = std::sqrt(2.0 * to_angular(p.gamma_phi));
  return j;
}

Super9 dissipation_tensor(const Mat3& jump) {
  const Mat3 k = jump.adjoint() * jump;
  Super9 d = Super9::Zero();
  for (int mu = 0; mu < 3; ++mu) {
    for (int nu = 0; nu < 3; ++nu) {
      const int row = pair_index(mu, nu);
      for (int mup = 0; mup < 3; ++mup) {
        for (int nup = 0; nup < 3; ++nup) {
          Complex v = -std::conj(jump(mu, mup)) * jump(nu, nup);
          if (mu == mup) v += 0.5 * k(nu, nup);
          if (nu == nup) v += 0.5 * std::conj(k(mu, mup));
          d(row, pair_index(mup, nup)) = v;
        }
      }
    }
  }
  return d;
}

Super9 xi_tensor(const Mat3& sigma_t) {
  // Radiative channel carries jump sqrt(2) sigma_t: emission into both
  // propagation directions of the line.
  return dissipation_tensor(std::sqrt(2.0) * sigma_t);
}

Super9 zeta_tensor(const Mat3& sigma_t) {
  const Mat3 st_dag = sigma_t.adjoint();
  Super9 z = Super9::Zero();
  for (int mu = 0; mu < 3; ++mu) {
    for (int nu = 0; nu < 3; ++nu) {
      const int row = pair_index(mu, nu);
      for (int mup = 0; mup < 3; ++mup) {
        for (int nup = 0; nup < 3; ++nup) {
          Complex v = 0.0;
          if (mu == mup) v += st_dag(nu, nup);
          if (nu == nup) v -= st_dag(mup, mu);
          z(row, pair_index(mup, nup)) = v;
        }
      }
    }
  }
  return z;
}

Super9 total_dissipation_tensor(const SystemParams& p, const Mat3& sigma_t_bare,
                                const Mat3& basis_columns,
                                const DissipationChannels& channels) {
  const Mat3 u = basis_columns;
  Super9 total = xi_tensor(u.adjoint() * sigma_t_bare * u);
  if (channels.nonradiative && p.gamma10_nr > 0) {
    total += dissipation_tensor(u.adjoint() * nonradiative_jump(p) * u);
  }
  if (channels.dephasing && p.gamma_phi > 0) {
    total += dissipation_tensor(u.adjoint() * dephasing_jump(p) * u);
  }
  return total;
}

std::vector<Mat3> jump_operators(const SystemParams& p, const DissipationChannels& channels) {
  std::vector<Mat3> jumps;
  jumps.push_back(std::sqrt(2.0) * transition_dipole(p).mat);
  if (channels.nonradiative && p.gamma10_nr > 0) jumps.push_back(nonradiative_jump(p));
  if (channels.dephasing && p.gamma_phi > 0) jumps.push_back(dephasing_jump(p));
  return jumps;
}

Vec9 vectorize(const Mat3& m) {
  Vec9 v;
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r) v(3 * c + r) = m(r, c);
  return v;
}

Mat3 unvectorize(const Vec9& v) {
  Mat3 m;
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r) m(r, c) = v(3 * c + r);
  return m;
}

Super9 commutator_superop(const Mat3& op) {
  const Mat3 id = Mat3::Identity();
  const Complex i_unit(0.0, 1.0);
  return -i_unit * (Eigen::kroneckerProduct(id, op) -
                    Eigen::kroneckerProduct(op.transpose(), id));
}

Super9 liouvillian(const Mat3& h, const std::vector<Mat3>& jumps) {
  const Mat3 id = Mat3::Identity();
  Super9 l = commutator_superop(h);
  for (const auto& j : jumps) {
    const Mat3 jdj = j.adjoint() * j;
    l += Eigen::kroneckerProduct(j.conjugate(), j);
    l -= 0.5 * Eigen::kroneckerProduct(id, jdj);
    l -= 0.5 * Eigen::kroneckerProduct(jdj.transpose(), id);
  }
  return l;
}

}  // namespace wqed
