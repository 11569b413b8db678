#pragma once

#include "wqed/steady_state.hpp"

namespace wqed {

// Complex transmission at one (drive strength, probe frequency) point.
// |t| > 1 is physical here: inverted dressed populations amplify the probe.
struct TransmissionPoint {
  double omega_p = 0.0;       // GHz
  Complex t = 0.0;
  double drive_rabi10 = 0.0;  // GHz
};

// Linear response of the emitter to a weak probe at omega_p: solves
//   i(w_{mu nu} + w_p - w_d) <sigma>_L - sum xi <sigma>_L = i F sum zeta <sigma>_s
// over dressed index pairs. Output scales linearly in F.
Vec9 probe_response(const SystemParams& p, const DriveConfig& d, double omega_p_ghz,
                    double probe_amplitude, const StationaryState& stationary);

// Transmission coefficient t = 1 - (i/F) sum <mu|sigma_t|nu> <sigma_{mu nu}>_L;
// independent of F. The stationary state is solved internally unless supplied.
TransmissionPoint transmission(const SystemParams& p, const DriveConfig& d,
                               double omega_p_ghz);
TransmissionPoint transmission(const SystemParams& p, const DriveConfig& d,
                               double omega_p_ghz, const StationaryState& stationary);

// Isolated-resonance closed form at the (lower -> upper) sideband:
//   t = 1 + |<lower|sigma_t|upper>|^2 (<s_uu> - <s_ll>) / xi_diag,
// evaluated with the exact stationary populations. sign(|t|-1) follows the
// dressed population difference.
Complex sideband_transmission(const SystemParams& p, const DriveConfig& d,
                              DressedLabel lower, DressedLabel upper);
Complex sideband_transmission(const StationaryState& stationary, const Mat3& sigma_t_dressed,
                              const Super9& xi, DressedLabel lower, DressedLabel upper);

// Sideband table with gain/loss classification from the stationary populations.
SidebandTable classified_sidebands(const StationaryState& stationary);

// Transmission of the drive tone itself, t = 1 - i <sigma_t>_s / E.
Complex drive_self_transmission(const SystemParams& p, const DriveConfig& d,
                                const DissipationChannels& channels = {});

// Time-domain oracle: integrates the master equation with the probe term
//   F (e^{i(w_d-w_p)t} sigma_t^dag + h.c.)
// added to the Hamiltonian, then lock-in extracts the transmitted component
// at the probe frequency by least-squares projection onto {1, e^{+-i dw t}}
// over the final window. At w_p = w_d the two tones cannot be separated, so
// the limit is evaluated from a 1 MHz probe offset.
struct TwoToneOptions {
  double settle_time = 0.0;   // 0: automatic, 50/gamma10
  double window_beats = 24.0; // demodulation window in beat periods
  double refine_tol = 3e-4;   // step-halving criterion on t
  int max_halvings = 12;
  DissipationChannels channels;
};

Complex two_tone_oracle(const SystemParams& p, const DriveConfig& d,
                        const ProbeConfig& probe, const TwoToneOptions& options = {});

}  // namespace wqed
