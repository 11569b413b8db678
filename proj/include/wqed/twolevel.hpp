#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wqed/params.hpp"

namespace wqed {

// Two-level resonance-fluorescence model: the 0<->1 transition alone, with
// nonradiative decay and pure dephasing. Rates are angular:
//   Gamma1 = gamma10, Gamma1_tot = gamma10 + gamma'_10, Gamma2 = Gamma1_tot/2 + gamma_p.
struct BlochRates {
  double Gamma1 = 0.0;
  double Gamma1_tot = 0.0;
  double Gamma2 = 0.0;

  static BlochRates from_params(const SystemParams& p);
  void validate() const;
};

// The Bloch-equation Rabi frequency is the full resonant splitting,
// 2 x the 0-1 Hamiltonian matrix element. With H_01 = Omega_R10/sqrt(2) that
// is sqrt(2) Omega_R10; use this bridge when comparing against the
// three-level solver, whose canonical drive scalar is Omega_R10.
inline double bloch_rabi_from_rabi10(double rabi10_angular) {
  return std::sqrt(2.0) * rabi10_angular;
}

// Closed-form drive transmission
//   t = 1 - (Gamma1/2 Gamma2) (1 + i dw/Gamma2)
//         / (1 + (dw/Gamma2)^2 + Omega^2/(Gamma1_tot Gamma2)),
// dw = w_d - w_10, all angular.
Complex t_closed_form(const BlochRates& rates, double delta_omega, double omega_rabi);

// Stationary solution of the two Bloch equations; an independent route to the
// same transmission through t = 1 - i sqrt(gamma10) <sigma01>_s / E.
struct BlochSteady {
  Complex sigma01;
  double sigma11;
};
BlochSteady bloch_steady(const BlochRates& rates, double delta_omega, double omega_rabi);
Complex transmission_from_bloch(const BlochRates& rates, double delta_omega,
                                double omega_rabi);

// One measured transmission point of a power/detuning sweep.
struct TraceRow {
  double power_dbm = 0.0;
  double detuning_ghz = 0.0;  // w_d/2pi relative to the fit reference frequency
  Complex t;
};

// Delimited text I/O: header "power_dbm,detuning_ghz,re_t,im_t", '#' comments
// ignored, comma or whitespace separated.
std::vector<TraceRow> load_traces(const std::string& path);
std::vector<TraceRow> parse_traces(const std::string& text);
std::string format_traces(const std::vector<TraceRow>& rows);

// Parameters of the five-parameter transmission fit, cycles units (GHz).
struct TwoLevelFitParams {
  double gamma10 = 0.04;
  double gamma10_nr = 0.0;
  double gamma_phi = 0.0;
  double omega10 = 7.558;
  double anchor_rabi10 = 0.113;  // Omega_R10/2pi at anchor_dbm

  PowerCalibration calibration(double anchor_dbm) const {
    return PowerCalibration{anchor_dbm, anchor_rabi10};
  }
};

struct FitSetup {
  double reference_ghz = 7.558;  // detuning column is w_d/2pi - reference_ghz
  double anchor_dbm = -110.0;    // fixed definition point of the calibration
  int max_iterations = 200;
  double step_tol = 1e-10;
};

struct FitResult {
  TwoLevelFitParams params;
  PowerCalibration calibration;
  Eigen::Matrix<double, 5, 5> covariance;  // order: g10, g10_nr, g_phi, w10, anchor
  double chi2 = 0.0;
  int n_points = 0;
  bool converged = false;
  int iterations = 0;
};

// Model evaluated by the fit: t_closed_form at
//   dw = 2pi (detuning + reference - omega10), Omega = sqrt(2) 2pi rabi10(P).
Complex fit_model(const TwoLevelFitParams& params, const FitSetup& setup,
                  double power_dbm, double detuning_ghz);

// Unweighted complex least squares over (gamma10, gamma'_10, gamma_p,
// omega10, calibration anchor), damped Gauss-Newton with finite-difference
// gradients; converges when the relative step drops below step_tol.
FitResult fit_traces(const std::vector<TraceRow>& data, const TwoLevelFitParams& guess,
                     const FitSetup& setup);

// Synthetic sweep generator for round-trip tests: complex Gaussian noise of
// standard deviation noise_sigma on each quadrature.
std::vector<TraceRow> synthesize_traces(const TwoLevelFitParams& truth, const FitSetup& setup,
                                        const std::vector<double>& powers_dbm,
                                        const std::vector<double>& detunings_ghz,
                                        double noise_sigma, std::uint64_t seed);

}  // namespace wqed
