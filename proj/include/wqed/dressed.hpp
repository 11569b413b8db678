#pragma once

#include <array>

#include "wqed/model.hpp"

namespace wqed {

enum class DressedLabel { g = 0, m = 1, e = 2 };
const char* to_string(DressedLabel l);

// Eigendecomposition of the rotating-frame Hamiltonian. Columns of `unitary`
// are the dressed states in the bare basis; quasi-energies sorted ascending,
// labels g < m < e by quasi-energy. Gauge: largest-magnitude component of
// each column real positive. Within degenerate subspaces (gap < 1e-9 angular)
// columns are rotated to align with distinct bare states.
struct DressedBasis {
  Vec3 energies = Vec3::Zero();     // angular, ascending
  Mat3 unitary = Mat3::Identity();  // U, with U^dag H U = diag(energies)
  DriveConfig drive;

  double omega(int mu, int nu) const { return energies[mu] - energies[nu]; }
};

DressedBasis diagonalize(const TaggedMatrix& hamiltonian, const DriveConfig& drive);
DressedBasis dress(const SystemParams& p, const DriveConfig& d);

// Overlap map, entry (j, mu) = |<j|mu>|^2.
Eigen::Matrix3d overlaps(const DressedBasis& basis);

// Operator transform into the dressed frame: U^dag A U.
Mat3 to_dressed(const TaggedMatrix& op_bare, const DressedBasis& basis);
TaggedMatrix to_dressed_tagged(const TaggedMatrix& op_bare, const DressedBasis& basis);

// Probe resonance between dressed ladders |lower,N> <-> |upper,N+1> at
// omega_d + omega_upper - omega_lower.
struct Sideband {
  DressedLabel lower = DressedLabel::g;
  DressedLabel upper = DressedLabel::g;
  double frequency_ghz = 0.0;
  enum class Kind { gain, loss, unknown } kind = Kind::unknown;
};

// The six ordered pairs mu != nu, lexicographic in (lower, upper); mirror
// pairs are symmetric about omega_d by construction.
using SidebandTable = std::array<Sideband, 6>;
SidebandTable sideband_frequencies(const DressedBasis& basis);

// Tensor builders that insist on a dressed-frame operator (throw on mismatch).
Super9 xi_tensor(const TaggedMatrix& sigma_t, const DressedBasis& basis);
Super9 zeta_tensor(const TaggedMatrix& sigma_t, const DressedBasis& basis);

}  // namespace wqed
