#pragma once

#include <vector>

#include "wqed/params.hpp"

namespace wqed {

using Super9 = Eigen::Matrix<Complex, 9, 9>;
using Vec9 = Eigen::Matrix<Complex, 9, 1>;

// Flattening of operator index pairs (mu,nu) used by all 9x9 superoperators.
constexpr int pair_index(int mu, int nu) { return 3 * mu + nu; }

// Project-wide expectation convention, asserted by unit test:
//   <sigma_{mu nu}> = Tr(rho |mu><nu|) = rho_{nu mu}.
// With it, <A_{mu nu}> = sum_{mu' nu'} A[(mu,nu),(mu',nu')] <sigma_{mu' nu'}>
// for any tensor built by operator_tensor-style sandwiching below.

// Hamiltonian in the frame rotating at the drive frequency, bare basis,
// angular units: diag(0, w10-wd, w20-2wd) plus E(sigma_t + sigma_t^dag).
TaggedMatrix rotating_hamiltonian(const SystemParams& p, const DriveConfig& d);

// Transition dipole sigma_t = sqrt(gamma10/2)|0><1| + sqrt(gamma21/2)|1><2|,
// angular units, bare basis. Row/column 2 pick up no (0,2) element: parity rule.
TaggedMatrix transition_dipole(const SystemParams& p);

// Jump operators for the optional loss channels of the two-level appendix
// model: nonradiative decay sqrt(gamma'_10)|0><1| and pure dephasing
// sqrt(2 gamma_p)|1><1| (bare basis, angular units).
Mat3 nonradiative_jump(const SystemParams& p);
Mat3 dephasing_jump(const SystemParams& p);

struct DissipationChannels {
  bool nonradiative = false;
  bool dephasing = false;
};

// Dissipation tensor of a single jump operator L, entries
//   D[(mu,nu),(mu',nu')] = 1/2 (delta_{mu mu'} (L^dag L)_{nu nu'}
//                              + (L^dag L)_{mu' mu} delta_{nu nu'})
//                          - (L^dag)_{mu' mu} L_{nu nu'},
// so that d<sigma_{mu nu}>/dt picks up -sum D <sigma_{mu' nu'}>.
Super9 dissipation_tensor(const Mat3& jump);

// Radiative damping tensor xi for the waveguide channel (jump sqrt(2) sigma_t):
//   xi_{mu nu} = sigma_{mu nu} K + K sigma_{mu nu} - 2 sigma_t^dag sigma_{mu nu} sigma_t,
// with K = sigma_t^dag sigma_t, expressed over index pairs of whatever basis
// sigma_t is given in.
Super9 xi_tensor(const Mat3& sigma_t);

// Drive-coupling tensor zeta_{mu nu} = [sigma_{mu nu}, sigma_t^dag] over the
// same index pairs.
Super9 zeta_tensor(const Mat3& sigma_t);

// Sum of the radiative tensor and any enabled loss channels, with every jump
// operator conjugated into the basis whose columns are given by `basis_columns`
// (identity for bare).
Super9 total_dissipation_tensor(const SystemParams& p, const Mat3& sigma_t_bare,
                                const Mat3& basis_columns,
                                const DissipationChannels& channels);

// Jump operators of the model in the bare basis, radiative channel first.
std::vector<Mat3> jump_operators(const SystemParams& p, const DissipationChannels& channels);

// Column-major vectorization and the matching master-equation generator,
// vec(A rho B) = (B^T kron A) vec(rho).
Vec9 vectorize(const Mat3& m);
Mat3 unvectorize(const Vec9& v);
Super9 commutator_superop(const Mat3& op);  // -i (I kron op - op^T kron I)
Super9 liouvillian(const Mat3& h, const std::vector<Mat3>& jumps);

}  // namespace wqed
