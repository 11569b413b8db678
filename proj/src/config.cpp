#include "wqed/config.hpp"

#include <fstream>
#include <sstream>

namespace wqed {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& value, int line) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(line, "expected a number, got '" + value + "'");
  }
}

long parse_integer(const std::string& value, int line) {
  try {
    size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(line, "expected an integer, got '" + value + "'");
  }
}

bool parse_flag(const std::string& value, int line) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(line, "expected true/false, got '" + value + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;

  // Calibration pieces are assembled after the walk.
  bool saw_anchor_dbm = false, saw_anchor_rabi10 = false;
  double anchor_dbm = -110.0, anchor_rabi10 = 0.113;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "system" && section != "drive" && section != "probe" &&
          section != "sweep" && section != "output" && section != "run" &&
          section != "fit" && section != "check") {
        throw ConfigError(line_no, "unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "empty key");
    if (value.empty()) throw ConfigError(line_no, "empty value for '" + key + "'");
    if (section.empty()) throw ConfigError(line_no, "key '" + key + "' outside any section");

    if (section == "system") {
      if (key == "omega10_ghz") cfg.system.omega10 = parse_number(value, line_no);
      else if (key == "omega21_ghz") cfg.system.omega21 = parse_number(value, line_no);
      else if (key == "gamma10_ghz") cfg.system.gamma10 = parse_number(value, line_no);
      else if (key == "gamma21_ghz") cfg.system.gamma21 = parse_number(value, line_no);
      else if (key == "gamma10_nr_ghz") cfg.system.gamma10_nr = parse_number(value, line_no);
      else if (key == "gamma_phi_ghz") cfg.system.gamma_phi = parse_number(value, line_no);
      else throw ConfigError(line_no, "unknown key '" + key + "' in [system]");
    } else if (section == "drive") {
      if (key == "frequency_mode") {
        if (value == "half_omega20") cfg.sweep.drive_frequency_mode = DriveFrequencyMode::half_omega20;
        else if (value == "omega10") cfg.sweep.drive_frequency_mode = DriveFrequencyMode::omega10;
        else if (value == "explicit") cfg.sweep.drive_frequency_mode = DriveFrequencyMode::explicit_value;
        else throw ConfigError(line_no, "frequency_mode must be half_omega20|omega10|explicit");
      } else if (key == "frequency_ghz") {
        cfg.sweep.drive_frequency = parse_number(value, line_no);
        cfg.drive.omega_d = cfg.sweep.drive_frequency;
      } else if (key == "amplitude_mode") {
        if (value == "rabi10") cfg.drive.amplitude_mode = AmplitudeMode::rabi10;
        else if (value == "field") cfg.drive.amplitude_mode = AmplitudeMode::field;
        else if (value == "dbm") cfg.drive.amplitude_mode = AmplitudeMode::dbm;
        else throw ConfigError(line_no, "amplitude_mode must be rabi10|field|dbm");
      } else if (key == "amplitude") {
        cfg.drive.value = parse_number(value, line_no);
      } else if (key == "anchor_dbm") {
        anchor_dbm = parse_number(value, line_no);
        saw_anchor_dbm = true;
      } else if (key == "anchor_rabi10_ghz") {
        anchor_rabi10 = parse_number(value, line_no);
        saw_anchor_rabi10 = true;
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [drive]");
      }
    } else if (section == "probe") {
      if (key == "frequency_ghz") cfg.probe.omega_p = parse_number(value, line_no);
      else if (key == "amplitude") cfg.probe.amplitude = parse_number(value, line_no);
      else throw ConfigError(line_no, "unknown key '" + key + "' in [probe]");
    } else if (section == "sweep") {
      if (key == "drive_min") cfg.sweep.drive_axis.min = parse_number(value, line_no);
      else if (key == "drive_max") cfg.sweep.drive_axis.max = parse_number(value, line_no);
      else if (key == "drive_n") cfg.sweep.drive_axis.n = static_cast<int>(parse_integer(value, line_no));
      else if (key == "drive_scale") {
        if (value == "rabi10") cfg.sweep.drive_scale = DriveScale::rabi10;
        else if (value == "dbm") cfg.sweep.drive_scale = DriveScale::dbm;
        else throw ConfigError(line_no, "drive_scale must be rabi10|dbm");
      } else if (key == "probe_min_ghz") cfg.sweep.probe_axis.min = parse_number(value, line_no);
      else if (key == "probe_max_ghz") cfg.sweep.probe_axis.max = parse_number(value, line_no);
      else if (key == "probe_n") cfg.sweep.probe_axis.n = static_cast<int>(parse_integer(value, line_no));
      else if (key == "outputs") {
        cfg.sweep.outputs.clear();
        std::istringstream items(value);
        std::string item;
        while (std::getline(items, item, ',')) {
          item = trim(item);
          if (item.empty()) continue;
          const auto o = sweep_output_from_string(item);
          if (!o) throw ConfigError(line_no, "unknown sweep output '" + item + "'");
          cfg.sweep.outputs.insert(*o);
        }
        if (cfg.sweep.outputs.empty()) throw ConfigError(line_no, "outputs list is empty");
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [sweep]");
      }
    } else if (section == "output") {
      if (key == "directory") cfg.output_directory = value;
      else if (key == "basename") cfg.basename = value;
      else if (key == "matrix") cfg.write_matrix_block = parse_flag(value, line_no);
      else if (key == "timestamp") cfg.timestamp = value;
      else throw ConfigError(line_no, "unknown key '" + key + "' in [output]");
    } else if (section == "run") {
      if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_integer(value, line_no));
      else if (key == "threads") cfg.threads = static_cast<int>(parse_integer(value, line_no));
      else throw ConfigError(line_no, "unknown key '" + key + "' in [run]");
    } else if (section == "fit") {
      if (key == "data") cfg.fit_data_path = value;
      else if (key == "reference_ghz") cfg.fit_setup.reference_ghz = parse_number(value, line_no);
      else if (key == "anchor_dbm") cfg.fit_setup.anchor_dbm = parse_number(value, line_no);
      else if (key == "guess_gamma10_ghz") cfg.fit_guess.gamma10 = parse_number(value, line_no);
      else if (key == "guess_gamma10_nr_ghz") cfg.fit_guess.gamma10_nr = parse_number(value, line_no);
      else if (key == "guess_gamma_phi_ghz") cfg.fit_guess.gamma_phi = parse_number(value, line_no);
      else if (key == "guess_omega10_ghz") cfg.fit_guess.omega10 = parse_number(value, line_no);
      else if (key == "guess_anchor_rabi10_ghz") cfg.fit_guess.anchor_rabi10 = parse_number(value, line_no);
      else throw ConfigError(line_no, "unknown key '" + key + "' in [fit]");
    } else if (section == "check") {
      if (key == "n_random") cfg.check_points = static_cast<int>(parse_integer(value, line_no));
      else throw ConfigError(line_no, "unknown key '" + key + "' in [check]");
    }
  }

  if (saw_anchor_dbm || saw_anchor_rabi10) {
    PowerCalibration cal{anchor_dbm, anchor_rabi10};
    cfg.drive.calibration = cal;
    cfg.sweep.calibration = cal;
  }

  try {
    cfg.system.validate();
  } catch (const ValidationError& err) {
    throw ConfigError(0, std::string("[system] ") + err.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace wqed
