#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <optional>

#include "wqed/errors.hpp"
#include "wqed/units.hpp"

namespace wqed {

using Complex = std::complex<double>;
using Mat3 = Eigen::Matrix3cd;
using Vec3 = Eigen::Vector3d;

enum class Basis { bare, dressed };

// 3x3 complex matrix carrying the basis it is expressed in.
struct TaggedMatrix {
  Mat3 mat = Mat3::Zero();
  Basis basis = Basis::bare;
};

// Hermiticity / density-matrix checks used at API boundaries.
void require_hermitian(const Mat3& m, double tol = 1e-13);
void require_density_matrix(const Mat3& rho, double trace_tol = 1e-12,
                            double eig_floor = -1e-10);

// Three-level ladder emitter radiatively coupled to a 1D line. All fields in
// cycles units (GHz): omega10 stores omega_10/2pi and so on. The direct 0<->2
// transition is dipole-forbidden by parity, so there is no gamma20 field.
struct SystemParams {
  double omega10 = 7.558;   // |0>-|1> transition frequency
  double omega21 = 7.070;   // |1>-|2> transition frequency
  double gamma10 = 0.040;   // radiative decay rate 1 -> 0
  double gamma21 = 0.080;   // radiative decay rate 2 -> 1
  double gamma10_nr = 0.0;  // nonradiative decay rate 1 -> 0
  double gamma_phi = 0.0;   // pure dephasing rate

  double omega20() const { return omega10 + omega21; }
  void validate() const;
};

// Power-to-Rabi calibration: Omega_R10(P) = anchor_rabi10 * 10^((P-anchor)/20),
// i.e. Omega^2 proportional to linear power.
struct PowerCalibration {
  double anchor_dbm = -110.0;
  double anchor_rabi10 = 0.113;  // Omega_R10/2pi at anchor_dbm, GHz

  double rabi10_at(double power_dbm) const {
    return anchor_rabi10 * std::pow(10.0, (power_dbm - anchor_dbm) / 20.0);
  }
  double dbm_for(double rabi10_ghz) const;
  void validate() const;
};

enum class AmplitudeMode { rabi10, field, dbm };

// Strong drive tone. The amplitude can be given as Omega_R10/2pi (GHz), as the
// bare field amplitude E (sqrt(angular GHz)), or as power in dBm through a
// calibration. Omega_R10 = sqrt(gamma10) E and Omega_R21 = sqrt(gamma21) E in
// angular units, for any representation.
struct DriveConfig {
  double omega_d = 7.314;  // GHz
  AmplitudeMode amplitude_mode = AmplitudeMode::rabi10;
  double value = 0.0;
  std::optional<PowerCalibration> calibration;

  // Canonical drive-strength scalar: Omega_R10/2pi in GHz.
  double rabi10(const SystemParams& p) const;
  // Field amplitude E in sqrt(angular GHz).
  double field_amplitude(const SystemParams& p) const;
  // Value this drive would have in another representation.
  double as_mode_value(AmplitudeMode mode, const SystemParams& p) const;

  DriveConfig with_rabi10(double rabi10_ghz) const {
    DriveConfig d = *this;
    d.amplitude_mode = AmplitudeMode::rabi10;
    d.value = rabi10_ghz;
    return d;
  }
  void validate(const SystemParams& p) const;
};

// Weak probe tone; F is kept far inside the linear regime (F^2 << gamma10).
struct ProbeConfig {
  double omega_p = 7.558;              // GHz
  std::optional<double> amplitude;     // F in sqrt(angular GHz)

  // Default F = 1e-3 sqrt(gamma10), which satisfies F^2 << gamma10 with headroom.
  double field_amplitude(const SystemParams& p) const {
    if (amplitude) return *amplitude;
    return 1e-3 * std::sqrt(to_angular(p.gamma10));
  }
};

}  // namespace wqed
