#pragma once

#include <vector>

#include "wqed/dressed.hpp"

namespace wqed {

// Stationary state of the driven emitter, dressed basis.
struct StationaryState {
  TaggedMatrix rho;                 // basis = dressed
  Vec9 expectations = Vec9::Zero(); // <sigma_{mu nu}>_s at pair_index(mu,nu)
  double residual = 0.0;            // max defect of the stationary equations
  DressedBasis basis;
  DissipationChannels channels;
  std::vector<int> active{0, 1, 2}; // dressed indices kept in the linear system

  Complex sigma(int mu, int nu) const { return expectations[pair_index(mu, nu)]; }
  double population(int mu) const { return expectations[pair_index(mu, mu)].real(); }
};

// Solves i w_{mu nu} <sigma_{mu nu}> - sum xi <sigma> = 0 with the trace sum
// rule replacing one population row. Dressed indices whose jump-operator rows
// and columns all vanish (exact two-level reduction, gamma21 = 0) are
// decoupled from the radiatively connected ground sector and carry zero
// weight in the returned state.
StationaryState solve_stationary(const SystemParams& p, const DriveConfig& d,
                                 const DissipationChannels& channels = {});

// Building block used by the self-check's negative control: solve from an
// externally supplied dissipation tensor. `active` lists the dressed indices
// kept in the linear system (all three in the generic case).
StationaryState solve_stationary_with_tensor(const DressedBasis& basis, const Super9& xi,
                                             const std::vector<int>& active);

// Indices kept by solve_stationary for these parameters/channels.
std::vector<int> active_indices(const SystemParams& p, const DressedBasis& basis,
                                const DissipationChannels& channels);

// Independent oracle: fixed-step 4th-order integration of the master equation
//   drho/dt = -i[H,rho] + 2 sigma_t rho sigma_t^dag - {sigma_t^dag sigma_t, rho}
// (plus optional loss channels) in the bare basis. The step is halved until
// the end state moves by less than `refine_tol`; throws if that never happens.
struct EvolveOptions {
  DissipationChannels channels;
  double refine_tol = 1e-8;
  int max_halvings = 18;
};

TaggedMatrix evolve_oracle(const SystemParams& p, const DriveConfig& d,
                           const TaggedMatrix& rho0_bare, double t_final, double dt,
                           const EvolveOptions& options = {});

// Convenience: default horizon 50/gamma10 (slowest relaxation scale) and an
// automatic initial step.
TaggedMatrix evolve_oracle_to_steady(const SystemParams& p, const DriveConfig& d,
                                     const EvolveOptions& options = {});

}  // namespace wqed
