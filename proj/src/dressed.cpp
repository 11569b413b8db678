#include "wqed/dressed.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>

namespace wqed {

const char* to_string(DressedLabel l) {
  switch (l) {
    case DressedLabel::g: return "g";
    case DressedLabel::m: return "m";
    case DressedLabel::e: return "e";
  }
  return "?";
}

namespace {

constexpr double degeneracy_gap = 1e-9;  // angular GHz

// Rotate the columns of a degenerate block so each aligns with a distinct
// bare state. The block subspace is projected onto the best-matching bare
// axes and the nearest unitary (polar factor) of that projection is applied,
// which keeps the result orthonormal and reproducible.
void align_block_with_bare(Mat3& u, int first, int count) {
  const Eigen::MatrixXcd block = u.block(0, first, 3, count);

  // Pick the `count` bare indices with the largest subspace weight.
  std::array<double, 3> weight{};
  for (int j = 0; j < 3; ++j) weight[j] = block.row(j).squaredNorm();
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return weight[a] > weight[b]; });
  std::vector<int> chosen(order.begin(), order.begin() + count);
  std::sort(chosen.begin(), chosen.end());

  Eigen::MatrixXcd proj(count, count);  // subspace coordinates of chosen bare axes
  for (int i = 0; i < count; ++i) proj.col(i) = block.row(chosen[i]).adjoint();

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(proj, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXcd rotation = svd.matrixU() * svd.matrixV().adjoint();
  u.block(0, first, 3, count) = block * rotation;
}

void fix_column_phases(Mat3& u) {
  for (int c = 0; c < 3; ++c) {
    int best = 0;
    double best_abs = 0.0;
    for (int r = 0; r < 3; ++r) {
      const double a = std::abs(u(r, c));
      if (a > best_abs * (1.0 + 1e-12)) {
        best_abs = a;
        best = r;
      }
    }
    if (best_abs > 0) {
      const Complex phase = u(best, c) / best_abs;
      u.col(c) *= std::conj(phase);
    }
  }
}

}  // namespace

DressedBasis diagonalize(const TaggedMatrix& hamiltonian, const DriveConfig& drive) {
  require_hermitian(hamiltonian.mat, 1e-10);
  Eigen::SelfAdjointEigenSolver<Mat3> es(hamiltonian.mat);
  if (es.info() != Eigen::Success) throw SolverError("eigendecomposition failed");

  DressedBasis basis;
  basis.energies = es.eigenvalues();  // ascending
  basis.unitary = es.eigenvectors();
  basis.drive = drive;

  // Degenerate blocks: consecutive quasi-energies closer than the gap
  // threshold get bare-aligned columns.
  int start = 0;
  while (start < 3) {
    int end = start + 1;
    while (end < 3 && basis.energies[end] - basis.energies[end - 1] < degeneracy_gap) ++end;
    if (end - start > 1) align_block_with_bare(basis.unitary, start, end - start);
    start = end;
  }
  fix_column_phases(basis.unitary);
  return basis;
}

DressedBasis dress(const SystemParams& p, const DriveConfig& d) {
  return diagonalize(rotating_hamiltonian(p, d), d);
}

Eigen::Matrix3d overlaps(const DressedBasis& basis) {
  return basis.unitary.cwiseAbs2();
}

Mat3 to_dressed(const TaggedMatrix& op_bare, const DressedBasis& basis) {
  if (op_bare.basis != Basis::bare) {
    throw ValidationError("to_dressed expects a bare-basis operator");
  }
  return basis.unitary.adjoint() * op_bare.mat * basis.unitary;
}

TaggedMatrix to_dressed_tagged(const TaggedMatrix& op_bare, const DressedBasis& basis) {
  return {to_dressed(op_bare, basis), Basis::dressed};
}

SidebandTable sideband_frequencies(const DressedBasis& basis) {
  SidebandTable table;
  int i = 0;
  for (int lower = 0; lower < 3; ++lower) {
    for (int upper = 0; upper < 3; ++upper) {
      if (lower == upper) continue;
      Sideband s;
      s.lower = static_cast<DressedLabel>(lower);
      s.upper = static_cast<DressedLabel>(upper);
      s.frequency_ghz = basis.drive.omega_d + to_cycles(basis.omega(upper, lower));
      table[i++] = s;
    }
  }
  return table;
}

Super9 xi_tensor(const TaggedMatrix& sigma_t, const DressedBasis&) {
  if (sigma_t.basis != Basis::dressed) {
    throw ValidationError("xi_tensor: sigma_t must be expressed in the dressed basis");
  }
  return xi_tensor(sigma_t.mat);
}

Super9 zeta_tensor(const TaggedMatrix& sigma_t, const DressedBasis&) {
  if (sigma_t.basis != Basis::dressed) {
    throw ValidationError("zeta_tensor: sigma_t must be expressed in the dressed basis");
  }
  return zeta_tensor(sigma_t.mat);
}

}  // namespace wqed
