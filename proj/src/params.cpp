#include "wqed/params.hpp"

#include <Eigen/Eigenvalues>

namespace wqed {

void require_hermitian(const Mat3& m, double tol) {
  const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (!(defect <= tol)) {
    throw ValidationError("matrix is not Hermitian (defect " + std::to_string(defect) + ")");
  }
}

void require_density_matrix(const Mat3& rho, double trace_tol, double eig_floor) {
  require_hermitian(rho, 1e-12);
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > trace_tol) {
    throw ValidationError("density matrix trace " + std::to_string(tr) + " != 1");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < eig_floor) {
    throw ValidationError("density matrix has negative eigenvalue " +
                          std::to_string(es.eigenvalues().minCoeff()));
  }
}

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ValidationError(std::string(name) + " must be finite");
}

}  // namespace

void SystemParams::validate() const {
  require_finite(omega10, "omega10");
  require_finite(omega21, "omega21");
  require_finite(gamma10, "gamma10");
  require_finite(gamma21, "gamma21");
  require_finite(gamma10_nr, "gamma10_nr");
  require_finite(gamma_phi, "gamma_phi");
  if (omega10 <= 0) throw ValidationError("omega10 must be positive");
  if (omega21 <= 0) throw ValidationError("omega21 must be positive");
  if (gamma10 < 0 || gamma21 < 0 || gamma10_nr < 0 || gamma_phi < 0) {
    throw ValidationError("decay and dephasing rates must be nonnegative");
  }
}

void PowerCalibration::validate() const {
  require_finite(anchor_dbm, "anchor_dbm");
  require_finite(anchor_rabi10, "anchor_rabi10");
  if (anchor_rabi10 <= 0) throw ValidationError("anchor_rabi10 must be positive");
}

double PowerCalibration::dbm_for(double rabi10_ghz) const {
  if (rabi10_ghz <= 0) throw ValidationError("dbm_for requires a positive Rabi frequency");
  return anchor_dbm + 20.0 * std::log10(rabi10_ghz / anchor_rabi10);
}

double DriveConfig::rabi10(const SystemParams& p) const {
  switch (amplitude_mode) {
    case AmplitudeMode::rabi10:
      return value;
    case AmplitudeMode::field:
      // Omega_ang = sqrt(gamma_ang) E
      return to_cycles(std::sqrt(to_angular(p.gamma10)) * value);
    case AmplitudeMode::dbm:
      if (!calibration) throw ValidationError("dBm drive amplitude requires a calibration");
      calibration->validate();
      return calibration->rabi10_at(value);
  }
  throw ValidationError("unknown amplitude mode");
}

double DriveConfig::field_amplitude(const SystemParams& p) const {
  if (amplitude_mode == AmplitudeMode::field) return value;
  const double omega_ang = to_angular(rabi10(p));
  if (p.gamma10 == 0.0) {
    if (omega_ang == 0.0) return 0.0;
    throw ValidationError("cannot convert Rabi frequency to field amplitude with gamma10 = 0");
  }
  return omega_ang / std::sqrt(to_angular(p.gamma10));
}

double DriveConfig::as_mode_value(AmplitudeMode mode, const SystemParams& p) const {
  switch (mode) {
    case AmplitudeMode::rabi10:
      return rabi10(p);
    case AmplitudeMode::field:
      return field_amplitude(p);
    case AmplitudeMode::dbm:
      if (!calibration) throw ValidationError("dBm conversion requires a calibration");
      return calibration->dbm_for(rabi10(p));
  }
  throw ValidationError("unknown amplitude mode");
}

void DriveConfig::validate(const SystemParams& p) const {
  if (!std::isfinite(omega_d) || omega_d <= 0) {
    throw ValidationError("drive frequency must be positive and finite");
  }
  if (!std::isfinite(value)) throw ValidationError("drive amplitude must be finite");
  if (amplitude_mode != AmplitudeMode::dbm && value < 0) {
    throw ValidationError("drive amplitude must be nonnegative");
  }
  (void)rabi10(p);  // exercises calibration checks
}

}  // namespace wqed
