#include "wqed/twolevel.hpp"

#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

namespace wqed {

BlochRates BlochRates::from_params(const SystemParams& p) {
  BlochRates r;
  r.Gamma1 = to_angular(p.gamma10);
  r.Gamma1_tot = to_angular(p.gamma10 + p.gamma10_nr);
  r.Gamma2 = r.Gamma1_tot / 2.0 + to_angular(p.gamma_phi);
  r.validate();
  return r;
}

void BlochRates::validate() const {
  if (!(Gamma1 > 0)) throw ValidationError("Gamma1 must be positive");
  if (Gamma1_tot < Gamma1) throw ValidationError("Gamma1_tot must be >= Gamma1");
  if (Gamma2 < Gamma1_tot / 2.0) throw ValidationError("Gamma2 must be >= Gamma1_tot/2");
}

Complex t_closed_form(const BlochRates& r, double delta_omega, double omega_rabi) {
  r.validate();
  const double x = delta_omega / r.Gamma2;
  const double denom = 1.0 + x * x + omega_rabi * omega_rabi / (r.Gamma1_tot * r.Gamma2);
  return 1.0 - (r.Gamma1 / (2.0 * r.Gamma2)) * Complex(1.0, x) / denom;
}

BlochSteady bloch_steady(const BlochRates& r, double delta_omega, double omega_rabi) {
  r.validate();
  // Saturation of the population equation, then the coherence follows.
  const double lorentz = r.Gamma2 * r.Gamma2 + delta_omega * delta_omega;
  const double pump = omega_rabi * omega_rabi * r.Gamma2 / (2.0 * r.Gamma1_tot * lorentz);
  const double sigma11 = pump / (1.0 + 2.0 * pump);
  const Complex sigma01 = Complex(0.0, -0.5 * omega_rabi) * (1.0 - 2.0 * sigma11) /
                          Complex(r.Gamma2, -delta_omega);
  return {sigma01, sigma11};
}

Complex transmission_from_bloch(const BlochRates& r, double delta_omega, double omega_rabi) {
  const BlochSteady s = bloch_steady(r, delta_omega, omega_rabi);
  if (omega_rabi == 0.0) return 1.0;
  // t = 1 - i sqrt(gamma10) <sigma01>/E with E = Omega/sqrt(gamma10).
  return 1.0 - Complex(0.0, 1.0) * r.Gamma1 * s.sigma01 / omega_rabi;
}

std::vector<TraceRow> parse_traces(const std::string& text) {
  std::vector<TraceRow> rows;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;  // blank or comment-only line
    if (!header_seen) {
      if (first != "power_dbm") {
        throw ValidationError("trace file line " + std::to_string(line_no) +
                              ": header row 'power_dbm,detuning_ghz,re_t,im_t' required");
      }
      header_seen = true;
      continue;
    }
    TraceRow row;
    double re = 0.0, im = 0.0;
    try {
      row.power_dbm = std::stod(first);
    } catch (const std::exception&) {
      throw ValidationError("trace file line " + std::to_string(line_no) + ": bad number");
    }
    if (!(fields >> row.detuning_ghz >> re >> im)) {
      throw ValidationError("trace file line " + std::to_string(line_no) +
                            ": expected power_dbm detuning_ghz re_t im_t");
    }
    row.t = Complex(re, im);
    rows.push_back(row);
  }
  if (!header_seen) throw ValidationError("trace file: missing header row");
  return rows;
}

std::vector<TraceRow> load_traces(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open trace file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_traces(buffer.str());
}

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string format_traces(const std::vector<TraceRow>& rows) {
  std::string out = "power_dbm,detuning_ghz,re_t,im_t\n";
  for (const auto& r : rows) {
    out += format_double(r.power_dbm);
    out += ',';
    out += format_double(r.detuning_ghz);
    out += ',';
    out += format_double(r.t.real());
    out += ',';
    out += format_double(r.t.imag());
    out += '\n';
  }
  return out;
}

Complex fit_model(const TwoLevelFitParams& params, const FitSetup& setup,
                  double power_dbm, double detuning_ghz) {
  BlochRates rates;
  rates.Gamma1 = to_angular(params.gamma10);
  rates.Gamma1_tot = to_angular(params.gamma10 + params.gamma10_nr);
  rates.Gamma2 = rates.Gamma1_tot / 2.0 + to_angular(params.gamma_phi);
  const double rabi10 = params.calibration(setup.anchor_dbm).rabi10_at(power_dbm);
  const double omega = bloch_rabi_from_rabi10(to_angular(rabi10));
  const double delta = to_angular(detuning_ghz + setup.reference_ghz - params.omega10);
  return t_closed_form(rates, delta, omega);
}

namespace {

using Theta = Eigen::Matrix<double, 5, 1>;

Theta pack(const TwoLevelFitParams& p) {
  Theta t;
  t << p.gamma10, p.gamma10_nr, p.gamma_phi, p.omega10, p.anchor_rabi10;
  return t;
}

TwoLevelFitParams unpack(const Theta& t) {
  TwoLevelFitParams p;
  p.gamma10 = t(0);
  p.gamma10_nr = t(1);
  p.gamma_phi = t(2);
  p.omega10 = t(3);
  p.anchor_rabi10 = t(4);
  return p;
}

Theta clamp_physical(Theta t) {
  t(0) = std::max(t(0), 1e-9);   // gamma10 > 0
  t(1) = std::max(t(1), 0.0);
  t(2) = std::max(t(2), 0.0);
  t(4) = std::max(t(4), 1e-12);  // anchor > 0
  return t;
}

Eigen::VectorXd residuals(const Theta& theta, const FitSetup& setup,
                          const std::vector<TraceRow>& data) {
  const TwoLevelFitParams p = unpack(theta);
  Eigen::VectorXd r(2 * data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    const Complex diff = fit_model(p, setup, data[i].power_dbm, data[i].detuning_ghz) - data[i].t;
    r(2 * i) = diff.real();
    r(2 * i + 1) = diff.imag();
  }
  return r;
}

}  // namespace

FitResult fit_traces(const std::vector<TraceRow>& data, const TwoLevelFitParams& guess,
                     const FitSetup& setup) {
  if (data.size() < 10) throw ValidationError("fit needs at least 10 data points");

  Theta theta = clamp_physical(pack(guess));
  Eigen::VectorXd r = residuals(theta, setup, data);
  double chi2 = r.squaredNorm();

  // Parameter scales for finite differences and the relative-step test.
  Theta scales;
  scales << std::max(guess.gamma10, 1e-3), 1e-3, 1e-3, std::max(guess.omega10, 1.0),
      std::max(guess.anchor_rabi10, 1e-3);

  double lambda = 1e-3;
  bool converged = false;
  int iteration = 0;
  Eigen::MatrixXd jac(r.size(), 5);

  for (; iteration < setup.max_iterations && !converged; ++iteration) {
    for (int k = 0; k < 5; ++k) {
      const double h = 1e-7 * scales(k);
      Theta bumped = theta;
      bumped(k) += h;
      bumped = clamp_physical(bumped);
      const double used = bumped(k) - theta(k);
      if (used == 0.0) {
        jac.col(k).setZero();
        continue;
      }
      jac.col(k) = (residuals(bumped, setup, data) - r) / used;
    }

    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;

    bool improved = false;
    for (int attempt = 0; attempt < 12 && !improved; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-14);
      const Theta step = damped.ldlt().solve(-jtr);
      const Theta candidate = clamp_physical(theta + step);
      const Eigen::VectorXd rc = residuals(candidate, setup, data);
      const double chi2c = rc.squaredNorm();
      if (chi2c <= chi2) {
        const double rel_step = ((candidate - theta).cwiseQuotient(scales)).cwiseAbs().maxCoeff();
        theta = candidate;
        r = rc;
        const bool plateau = chi2 - chi2c <= setup.step_tol * std::max(chi2, 1e-300);
        chi2 = chi2c;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = true;
        if (rel_step < setup.step_tol || (plateau && rel_step < 1e-7)) converged = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!improved) {
      converged = chi2 <= 1e-20 * data.size() ||
                  jtr.cwiseAbs().maxCoeff() < 1e-14 * std::max(1.0, chi2);
      break;
    }
  }

  FitResult result;
  result.params = unpack(theta);
  result.calibration = result.params.calibration(setup.anchor_dbm);
  result.chi2 = chi2;
  result.n_points = static_cast<int>(data.size());
  result.converged = converged;
  result.iterations = iteration;

  // Covariance from the final Jacobian; unidentifiable directions (e.g. the
  // calibration anchor when every point shares one power) show up as huge
  // variances through the pseudo-inverse.
  for (int k = 0; k < 5; ++k) {
    const double h = 1e-7 * scales(k);
    Theta bumped = theta;
    bumped(k) += h;
    bumped = clamp_physical(bumped);
    const double used = bumped(k) - theta(k);
    if (used == 0.0) {
      jac.col(k).setZero();
      continue;
    }
    jac.col(k) = (residuals(bumped, setup, data) - r) / used;
  }
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  const int dof = std::max<int>(1, 2 * result.n_points - 5);
  const double variance = chi2 / dof;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jtj, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double cutoff = 1e-14 * svd.singularValues().maxCoeff();
  Eigen::Matrix<double, 5, 5> inv = Eigen::Matrix<double, 5, 5>::Zero();
  for (int k = 0; k < 5; ++k) {
    const double s = svd.singularValues()(k);
    const double is = s > cutoff ? 1.0 / s : 1e30;
    inv += is * svd.matrixV().col(k) * svd.matrixU().col(k).transpose();
  }
  result.covariance = variance * 0.5 * (inv + inv.transpose());
  return result;
}

std::vector<TraceRow> synthesize_traces(const TwoLevelFitParams& truth, const FitSetup& setup,
                                        const std::vector<double>& powers_dbm,
                                        const std::vector<double>& detunings_ghz,
                                        double noise_sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<TraceRow> rows;
  rows.reserve(powers_dbm.size() * detunings_ghz.size());
  for (double power : powers_dbm) {
    for (double det : detunings_ghz) {
      TraceRow row;
      row.power_dbm = power;
      row.detuning_ghz = det;
      Complex t = fit_model(truth, setup, power, det);
      if (noise_sigma > 0) t += noise_sigma * Complex(noise(rng), noise(rng));
      row.t = t;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace wqed
