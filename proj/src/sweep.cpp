#include "wqed/sweep.hpp"

#include <atomic>
#include <charconv>
#include <functional>
#include <sstream>
#include <thread>

#include "wqed/version.hpp"

namespace wqed {

const char* to_string(SweepOutput o) {
  switch (o) {
    case SweepOutput::transmission_map: return "transmission_map";
    case SweepOutput::dressed_energies: return "dressed_energies";
    case SweepOutput::overlaps: return "overlaps";
    case SweepOutput::populations: return "populations";
    case SweepOutput::sidebands: return "sidebands";
    case SweepOutput::self_transmission: return "self_transmission";
  }
  return "?";
}

std::optional<SweepOutput> sweep_output_from_string(const std::string& name) {
  for (SweepOutput o :
       {SweepOutput::transmission_map, SweepOutput::dressed_energies, SweepOutput::overlaps,
        SweepOutput::populations, SweepOutput::sidebands, SweepOutput::self_transmission}) {
    if (name == to_string(o)) return o;
  }
  return std::nullopt;
}

double SweepSpec::resolve_drive_frequency(const SystemParams& p) const {
  switch (drive_frequency_mode) {
    case DriveFrequencyMode::half_omega20: return p.omega20() / 2.0;
    case DriveFrequencyMode::omega10: return p.omega10;
    case DriveFrequencyMode::explicit_value: return drive_frequency;
  }
  throw ValidationError("unknown drive frequency mode");
}

void SweepSpec::validate() const {
  const auto check_axis = [](const AxisSpec& a, const char* name) {
    if (a.n < 1) throw ValidationError(std::string(name) + " axis needs n >= 1");
    if (a.n >= 2 && !(a.max > a.min)) {
      throw ValidationError(std::string(name) + " axis must be strictly increasing");
    }
    if (!std::isfinite(a.min) || !std::isfinite(a.max)) {
      throw ValidationError(std::string(name) + " axis bounds must be finite");
    }
  };
  check_axis(drive_axis, "drive");
  if (outputs.count(SweepOutput::transmission_map)) check_axis(probe_axis, "probe");
  if (drive_scale == DriveScale::dbm && !calibration) {
    throw ValidationError("dBm drive axis requires a calibration");
  }
  if (drive_frequency_mode == DriveFrequencyMode::explicit_value &&
      !(drive_frequency > 0 && std::isfinite(drive_frequency))) {
    throw ValidationError("explicit drive frequency must be positive");
  }
  if (outputs.empty()) throw ValidationError("sweep requests no outputs");
}

namespace {

std::vector<double> linspace(const AxisSpec& a) {
  std::vector<double> v(a.n);
  if (a.n == 1) {
    v[0] = a.min;
    return v;
  }
  const double span = a.max - a.min;
  for (int i = 0; i < a.n; ++i) {
    v[i] = a.min + span * (static_cast<double>(i) / static_cast<double>(a.n - 1));
  }
  return v;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ValidationError("bad number in sweep file: '" + std::string(s) + "'");
  }
  return v;
}

// Runs fn(i) for i in [0, count) on `threads` workers; every index writes its
// own output slot, so the result is identical for any worker count.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  int n = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(1, std::min(n, count));
  if (n == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (int w = 0; w < n; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

SweepResult run_sweep(const SystemParams& p, const SweepSpec& spec, int threads) {
  p.validate();
  spec.validate();

  SweepResult result;
  result.params = p;
  result.spec = spec;
  result.drive_values = linspace(spec.drive_axis);
  const double omega_d = spec.resolve_drive_frequency(p);

  result.drive_rabi10.resize(result.drive_values.size());
  for (size_t i = 0; i < result.drive_values.size(); ++i) {
    if (spec.drive_scale == DriveScale::dbm) {
      result.drive_rabi10[i] = spec.calibration->rabi10_at(result.drive_values[i]);
    } else {
      result.drive_rabi10[i] = result.drive_values[i];
    }
  }

  const bool want_map = spec.outputs.count(SweepOutput::transmission_map) > 0;
  const bool want_energies = spec.outputs.count(SweepOutput::dressed_energies) > 0;
  const bool want_overlaps = spec.outputs.count(SweepOutput::overlaps) > 0;
  const bool want_populations = spec.outputs.count(SweepOutput::populations) > 0;
  const bool want_sidebands = spec.outputs.count(SweepOutput::sidebands) > 0;
  const bool want_self = spec.outputs.count(SweepOutput::self_transmission) > 0;
  const bool need_stationary = want_map || want_populations || want_sidebands || want_self;

  const int nd = static_cast<int>(result.drive_values.size());
  if (want_map) {
    result.probe_ghz = linspace(spec.probe_axis);
    result.t.assign(static_cast<size_t>(nd) * result.probe_ghz.size(), Complex(0.0, 0.0));
    result.ok.assign(result.t.size(), 0);
  }
  if (want_energies) result.energies.assign(3 * nd, 0.0);
  if (want_overlaps) result.overlap_rows.assign(9 * nd, 0.0);
  if (want_populations) result.population_rows.assign(9 * nd, 0.0);
  if (want_sidebands) result.sideband_rows.assign(6 * nd, Sideband{});
  if (want_self) {
    result.self_t.assign(nd, Complex(0.0, 0.0));
    result.self_ok.assign(nd, 0);
  }

  const int np = static_cast<int>(result.probe_ghz.size());

  parallel_for(nd, threads, [&](int i) {
    const DriveConfig drive =
        DriveConfig{omega_d, AmplitudeMode::rabi10, result.drive_rabi10[i], std::nullopt};
    DressedBasis basis;
    try {
      basis = dress(p, drive);
    } catch (const std::exception&) {
      return;  // whole column stays flagged
    }
    if (want_energies) {
      for (int k = 0; k < 3; ++k) result.energies[3 * i + k] = to_cycles(basis.energies[k]);
    }
    if (want_overlaps) {
      const Eigen::Matrix3d o = overlaps(basis);
      for (int j = 0; j < 3; ++j)
        for (int mu = 0; mu < 3; ++mu) result.overlap_rows[9 * i + 3 * j + mu] = o(j, mu);
    }

    if (!need_stationary) {
      if (want_sidebands) {
        const SidebandTable table = sideband_frequencies(basis);
        for (int k = 0; k < 6; ++k) result.sideband_rows[6 * i + k] = table[k];
      }
      return;
    }

    StationaryState stationary;
    try {
      stationary = solve_stationary(p, drive);
    } catch (const std::exception&) {
      if (want_sidebands) {
        const SidebandTable table = sideband_frequencies(basis);
        for (int k = 0; k < 6; ++k) result.sideband_rows[6 * i + k] = table[k];
      }
      return;
    }

    if (want_populations) {
      double* row = &result.population_rows[9 * i];
      row[0] = stationary.population(0);
      row[1] = stationary.population(1);
      row[2] = stationary.population(2);
      const Mat3& rho = stationary.rho.mat;
      row[3] = rho(0, 1).real();
      row[4] = rho(0, 1).imag();
      row[5] = rho(0, 2).real();
      row[6] = rho(0, 2).imag();
      row[7] = rho(1, 2).real();
      row[8] = rho(1, 2).imag();
    }
    if (want_sidebands) {
      const SidebandTable table = classified_sidebands(stationary);
      for (int k = 0; k < 6; ++k) result.sideband_rows[6 * i + k] = table[k];
    }
    if (want_self) {
      if (result.drive_rabi10[i] > 0) {
        try {
          result.self_t[i] = drive_self_transmission(p, drive);
          result.self_ok[i] = 1;
        } catch (const std::exception&) {
        }
      }
    }
    if (want_map) {
      for (int j = 0; j < np; ++j) {
        try {
          const TransmissionPoint point = transmission(p, drive, result.probe_ghz[j], stationary);
          result.t[static_cast<size_t>(i) * np + j] = point.t;
          result.ok[static_cast<size_t>(i) * np + j] = 1;
        } catch (const std::exception&) {
        }
      }
    }
  });

  result.metadata = {
      std::string("wqed ") + version,
      "system: omega10_ghz=" + format_double(p.omega10) + " omega21_ghz=" +
          format_double(p.omega21) + " gamma10_ghz=" + format_double(p.gamma10) +
          " gamma21_ghz=" + format_double(p.gamma21),
      "drive: frequency_ghz=" + format_double(omega_d) + " scale=" +
          (spec.drive_scale == DriveScale::dbm ? std::string("dbm") : std::string("rabi10")) +
          " min=" + format_double(spec.drive_axis.min) + " max=" +
          format_double(spec.drive_axis.max) + " n=" + std::to_string(spec.drive_axis.n),
  };
  if (want_map) {
    result.metadata.push_back("probe: min_ghz=" + format_double(spec.probe_axis.min) +
                              " max_ghz=" + format_double(spec.probe_axis.max) +
                              " n=" + std::to_string(spec.probe_axis.n));
  }
  return result;
}

std::string export_long_csv(const SweepResult& result) {
  std::string out;
  for (const auto& line : result.metadata) {
    out += "# ";
    out += line;
    out += '\n';
  }
  out += "drive_value,probe_ghz,re_t,im_t,abs_t,ok\n";
  const size_t np = result.probe_ghz.size();
  for (size_t i = 0; i < result.drive_values.size(); ++i) {
    for (size_t j = 0; j < np; ++j) {
      const Complex t = result.t[i * np + j];
      out += format_double(result.drive_values[i]);
      out += ',';
      out += format_double(result.probe_ghz[j]);
      out += ',';
      out += format_double(t.real());
      out += ',';
      out += format_double(t.imag());
      out += ',';
      out += format_double(std::hypot(t.real(), t.imag()));
      out += ',';
      out += result.ok[i * np + j] ? '1' : '0';
      out += '\n';
    }
  }
  return out;
}

SweepResult parse_long_csv(const std::string& text) {
  SweepResult result;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  std::vector<double> drive_col, probe_col;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      if (header_seen) throw ValidationError("sweep file: metadata after header");
      result.metadata.push_back(line.substr(2));
      continue;
    }
    if (!header_seen) {
      if (line != "drive_value,probe_ghz,re_t,im_t,abs_t,ok") {
        throw ValidationError("sweep file: unexpected header '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    std::array<std::string_view, 6> fields;
    std::string_view rest(line);
    for (int k = 0; k < 6; ++k) {
      const auto comma = rest.find(',');
      if ((comma == std::string_view::npos) != (k == 5)) {
        throw ValidationError("sweep file: expected 6 columns: '" + line + "'");
      }
      fields[k] = rest.substr(0, comma);
      if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }
    drive_col.push_back(parse_double(fields[0]));
    probe_col.push_back(parse_double(fields[1]));
    result.t.emplace_back(parse_double(fields[2]), parse_double(fields[3]));
    (void)parse_double(fields[4]);  // abs_t is derived; recomputed on export
    if (fields[5] == "1") {
      result.ok.push_back(1);
    } else if (fields[5] == "0") {
      result.ok.push_back(0);
    } else {
      throw ValidationError("sweep file: ok flag must be 0 or 1");
    }
  }
  if (!header_seen) throw ValidationError("sweep file: missing header");

  // Recover the axes: rows are drive-major, probe cycling fastest.
  size_t np = probe_col.size();
  for (size_t j = 1; j < probe_col.size(); ++j) {
    if (drive_col[j] != drive_col[0]) {
      np = j;
      break;
    }
  }
  if (np == 0 || probe_col.size() % np != 0) {
    throw ValidationError("sweep file: ragged grid");
  }
  result.probe_ghz.assign(probe_col.begin(), probe_col.begin() + np);
  for (size_t i = 0; i < drive_col.size(); i += np) result.drive_values.push_back(drive_col[i]);
  result.drive_rabi10 = result.drive_values;
  result.spec.drive_axis = {result.drive_values.front(), result.drive_values.back(),
                            static_cast<int>(result.drive_values.size())};
  result.spec.probe_axis = {result.probe_ghz.front(), result.probe_ghz.back(),
                            static_cast<int>(np)};
  return result;
}

std::string export_matrix_block(const SweepResult& result) {
  std::string out = "# matrix abs_t (rows: probe_ghz, cols: drive_value)\n";
  out += "# drive_value:";
  for (double v : result.drive_values) {
    out += ' ';
    out += format_double(v);
  }
  out += "\n# probe_ghz:";
  for (double v : result.probe_ghz) {
    out += ' ';
    out += format_double(v);
  }
  out += '\n';
  const size_t np = result.probe_ghz.size();
  for (size_t j = 0; j < np; ++j) {
    for (size_t i = 0; i < result.drive_values.size(); ++i) {
      if (i) out += ' ';
      out += format_double(std::abs(result.t[i * np + j]));
    }
    out += '\n';
  }
  return out;
}

std::string export_drive_table(const SweepResult& result, SweepOutput which) {
  std::string out;
  for (const auto& line : result.metadata) {
    out += "# ";
    out += line;
    out += '\n';
  }
  const size_t nd = result.drive_values.size();
  switch (which) {
    case SweepOutput::dressed_energies: {
      out += "drive_value,omega_g_ghz,omega_m_ghz,omega_e_ghz\n";
      for (size_t i = 0; i < nd; ++i) {
        out += format_double(result.drive_values[i]);
        for (int k = 0; k < 3; ++k) {
          out += ',';
          out += format_double(result.energies[3 * i + k]);
        }
        out += '\n';
      }
      return out;
    }
    case SweepOutput::overlaps: {
      out += "drive_value";
      for (int j = 0; j < 3; ++j)
        for (const char* mu : {"g", "m", "e"})
          out += ",overlap_" + std::to_string(j) + mu;
      out += '\n';
      for (size_t i = 0; i < nd; ++i) {
        out += format_double(result.drive_values[i]);
        for (int k = 0; k < 9; ++k) {
          out += ',';
          out += format_double(result.overlap_rows[9 * i + k]);
        }
        out += '\n';
      }
      return out;
    }
    case SweepOutput::populations: {
      out += "drive_value,pop_g,pop_m,pop_e,re_gm,im_gm,re_ge,im_ge,re_me,im_me\n";
      for (size_t i = 0; i < nd; ++i) {
        out += format_double(result.drive_values[i]);
        for (int k = 0; k < 9; ++k) {
          out += ',';
          out += format_double(result.population_rows[9 * i + k]);
        }
        out += '\n';
      }
      return out;
    }
    case SweepOutput::sidebands: {
      out += "drive_value,lower,upper,frequency_ghz,kind\n";
      for (size_t i = 0; i < nd; ++i) {
        for (int k = 0; k < 6; ++k) {
          const Sideband& s = result.sideband_rows[6 * i + k];
          out += format_double(result.drive_values[i]);
          out += ',';
          out += to_string(s.lower);
          out += ',';
          out += to_string(s.upper);
          out += ',';
          out += format_double(s.frequency_ghz);
          out += ',';
          out += s.kind == Sideband::Kind::gain ? "gain"
                 : s.kind == Sideband::Kind::loss ? "loss"
                                                  : "unknown";
          out += '\n';
        }
      }
      return out;
    }
    case SweepOutput::self_transmission: {
      out += "drive_value,re_t,im_t,abs_t,ok\n";
      for (size_t i = 0; i < nd; ++i) {
        const Complex t = result.self_t[i];
        out += format_double(result.drive_values[i]);
        out += ',';
        out += format_double(t.real());
        out += ',';
        out += format_double(t.imag());
        out += ',';
        out += format_double(std::hypot(t.real(), t.imag()));
        out += ',';
        out += result.self_ok[i] ? '1' : '0';
        out += '\n';
      }
      return out;
    }
    case SweepOutput::transmission_map:
      return export_long_csv(result);
  }
  throw ValidationError("unknown sweep output");
}

}  // namespace wqed
