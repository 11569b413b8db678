// Command-line front end: dressed-state tables, population and transmission
// sweeps, sideband reports, the two-level transmission fit, and the built-in
// consistency checks. Subcommands read an INI config; flags override it.

#include <CLI11.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "wqed/config.hpp"
#include "wqed/selfcheck.hpp"
#include "wqed/version.hpp"

using namespace wqed;

namespace {

enum ExitCode : int {
  exit_ok = 0,
  exit_config = 2,
  exit_solver = 3,
  exit_check = 4,
};

struct Overrides {
  std::optional<std::string> config_path;
  std::optional<double> omega10, omega21, gamma10, gamma21, gamma10_nr, gamma_phi;
  std::optional<std::string> drive_freq_mode;
  std::optional<double> drive_freq;
  std::optional<std::string> drive_amp_mode;
  std::optional<double> drive_amp;
  std::optional<double> probe_freq;
  std::optional<std::string> outdir, basename;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> data_path;
  bool matrix = false;
  bool corrupt_xi = false;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "INI config file");
  cmd->add_option("--omega10", o.omega10, "omega10/2pi in GHz");
  cmd->add_option("--omega21", o.omega21, "omega21/2pi in GHz");
  cmd->add_option("--gamma10", o.gamma10, "gamma10/2pi in GHz");
  cmd->add_option("--gamma21", o.gamma21, "gamma21/2pi in GHz");
  cmd->add_option("--gamma10-nr", o.gamma10_nr, "nonradiative decay in GHz");
  cmd->add_option("--gamma-phi", o.gamma_phi, "pure dephasing in GHz");
  cmd->add_option("--drive-freq-mode", o.drive_freq_mode,
                  "half_omega20 | omega10 | explicit");
  cmd->add_option("--drive-freq", o.drive_freq, "drive frequency in GHz (explicit mode)");
  cmd->add_option("--drive-amp-mode", o.drive_amp_mode, "rabi10 | field | dbm");
  cmd->add_option("--drive-amp", o.drive_amp, "drive amplitude in the chosen mode");
  cmd->add_option("--probe-freq", o.probe_freq, "probe frequency in GHz");
  cmd->add_option("-o,--outdir", o.outdir, "output directory");
  cmd->add_option("--basename", o.basename, "output file basename");
  cmd->add_option("--threads", o.threads, "worker thread cap (0 = hardware)");
  cmd->add_option("--seed", o.seed, "seed for randomized commands");
}

RunConfig assemble(const Overrides& o) {
  RunConfig cfg;
  if (o.config_path) cfg = load_config(*o.config_path);
  if (o.omega10) cfg.system.omega10 = *o.omega10;
  if (o.omega21) cfg.system.omega21 = *o.omega21;
  if (o.gamma10) cfg.system.gamma10 = *o.gamma10;
  if (o.gamma21) cfg.system.gamma21 = *o.gamma21;
  if (o.gamma10_nr) cfg.system.gamma10_nr = *o.gamma10_nr;
  if (o.gamma_phi) cfg.system.gamma_phi = *o.gamma_phi;
  if (o.drive_freq_mode) {
    if (*o.drive_freq_mode == "half_omega20")
      cfg.sweep.drive_frequency_mode = DriveFrequencyMode::half_omega20;
    else if (*o.drive_freq_mode == "omega10")
      cfg.sweep.drive_frequency_mode = DriveFrequencyMode::omega10;
    else if (*o.drive_freq_mode == "explicit")
      cfg.sweep.drive_frequency_mode = DriveFrequencyMode::explicit_value;
    else
      throw ConfigError(0, "--drive-freq-mode must be half_omega20|omega10|explicit");
  }
  if (o.drive_freq) {
    cfg.sweep.drive_frequency = *o.drive_freq;
    cfg.sweep.drive_frequency_mode = DriveFrequencyMode::explicit_value;
  }
  if (o.drive_amp_mode) {
    if (*o.drive_amp_mode == "rabi10") cfg.drive.amplitude_mode = AmplitudeMode::rabi10;
    else if (*o.drive_amp_mode == "field") cfg.drive.amplitude_mode = AmplitudeMode::field;
    else if (*o.drive_amp_mode == "dbm") cfg.drive.amplitude_mode = AmplitudeMode::dbm;
    else throw ConfigError(0, "--drive-amp-mode must be rabi10|field|dbm");
  }
  if (o.drive_amp) cfg.drive.value = *o.drive_amp;
  if (o.probe_freq) cfg.probe.omega_p = *o.probe_freq;
  if (o.outdir) cfg.output_directory = *o.outdir;
  if (o.basename) cfg.basename = *o.basename;
  if (o.threads) cfg.threads = *o.threads;
  if (o.seed) cfg.seed = *o.seed;
  if (o.data_path) cfg.fit_data_path = *o.data_path;
  if (o.matrix) cfg.write_matrix_block = true;

  cfg.system.validate();
  if (cfg.sweep.drive_frequency_mode == DriveFrequencyMode::explicit_value &&
      !(cfg.sweep.drive_frequency > 0)) {
    cfg.sweep.drive_frequency = cfg.drive.omega_d;
  }
  cfg.drive.omega_d = cfg.sweep.resolve_drive_frequency(cfg.system);
  return cfg;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::filesystem::path output_file(const RunConfig& cfg, const std::string& suffix) {
  std::filesystem::create_directories(cfg.output_directory);
  return std::filesystem::path(cfg.output_directory) / (cfg.basename + "_" + suffix);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SolverError("cannot write " + path.string());
  out << content;
  std::cout << "wrote " << path.string() << "\n";
}

SweepSpec drive_only_spec(const RunConfig& cfg, std::set<SweepOutput> outputs) {
  SweepSpec spec = cfg.sweep;
  spec.outputs = std::move(outputs);
  return spec;
}

int cmd_dressed(const RunConfig& cfg) {
  const SweepSpec spec = drive_only_spec(
      cfg, {SweepOutput::dressed_energies, SweepOutput::overlaps, SweepOutput::sidebands});
  const SweepResult result = run_sweep(cfg.system, spec, cfg.threads);
  write_file(output_file(cfg, "energies.csv"),
             export_drive_table(result, SweepOutput::dressed_energies));
  write_file(output_file(cfg, "overlaps.csv"),
             export_drive_table(result, SweepOutput::overlaps));
  write_file(output_file(cfg, "sidebands.csv"),
             export_drive_table(result, SweepOutput::sidebands));
  return exit_ok;
}

int cmd_populations(const RunConfig& cfg) {
  const SweepSpec spec = drive_only_spec(cfg, {SweepOutput::populations});
  const SweepResult result = run_sweep(cfg.system, spec, cfg.threads);
  write_file(output_file(cfg, "populations.csv"),
             export_drive_table(result, SweepOutput::populations));
  return exit_ok;
}

int cmd_map(const RunConfig& cfg) {
  SweepSpec spec = cfg.sweep;
  spec.outputs = {SweepOutput::transmission_map};
  const SweepResult result = run_sweep(cfg.system, spec, cfg.threads);
  write_file(output_file(cfg, "map.csv"), export_long_csv(result));
  if (cfg.write_matrix_block) {
    write_file(output_file(cfg, "map_matrix.txt"), export_matrix_block(result));
  }
  std::size_t failed = 0;
  for (auto flag : result.ok)
    if (!flag) ++failed;
  if (failed) std::cout << failed << " cells flagged as failed\n";
  return exit_ok;
}

int cmd_sidebands(const RunConfig& cfg) {
  const StationaryState s = solve_stationary(cfg.system, cfg.drive);
  const Mat3 st_dressed = to_dressed(transition_dipole(cfg.system), s.basis);
  const Super9 xi = total_dissipation_tensor(cfg.system, transition_dipole(cfg.system).mat,
                                             s.basis.unitary, {});
  std::string out = "lower,upper,frequency_ghz,kind,closed_form_abs_t,full_abs_t\n";
  for (const auto& sb : classified_sidebands(s)) {
    const Complex closed = sideband_transmission(s, st_dressed, xi, sb.lower, sb.upper);
    const Complex full = transmission(cfg.system, cfg.drive, sb.frequency_ghz, s).t;
    out += std::string(to_string(sb.lower)) + "," + to_string(sb.upper) + "," +
           format_double(sb.frequency_ghz) + "," +
           (sb.kind == Sideband::Kind::gain   ? "gain"
            : sb.kind == Sideband::Kind::loss ? "loss"
                                              : "unknown") +
           "," + format_double(std::abs(closed)) + "," + format_double(std::abs(full)) + "\n";
  }
  std::cout << out;
  write_file(output_file(cfg, "sideband_point.csv"), out);
  return exit_ok;
}

int cmd_fit(const RunConfig& cfg) {
  if (cfg.fit_data_path.empty()) throw ConfigError(0, "fit requires [fit] data = <path>");
  const auto data = load_traces(cfg.fit_data_path);
  const FitResult fit = fit_traces(data, cfg.fit_guess, cfg.fit_setup);
  std::string out;
  out += "gamma10_ghz = " + format_double(fit.params.gamma10) + "\n";
  out += "gamma10_nr_ghz = " + format_double(fit.params.gamma10_nr) + "\n";
  out += "gamma_phi_ghz = " + format_double(fit.params.gamma_phi) + "\n";
  out += "omega10_ghz = " + format_double(fit.params.omega10) + "\n";
  out += "anchor_rabi10_ghz = " + format_double(fit.params.anchor_rabi10) + "\n";
  out += "anchor_dbm = " + format_double(fit.calibration.anchor_dbm) + "\n";
  out += "chi2 = " + format_double(fit.chi2) + "\n";
  out += "n_points = " + std::to_string(fit.n_points) + "\n";
  out += "converged = " + std::string(fit.converged ? "true" : "false") + "\n";
  out += "iterations = " + std::to_string(fit.iterations) + "\n";
  out += "covariance =\n";
  for (int r = 0; r < 5; ++r) {
    out += " ";
    for (int c = 0; c < 5; ++c) out += " " + format_double(fit.covariance(r, c));
    out += "\n";
  }
  std::cout << out;
  write_file(output_file(cfg, "fit.txt"), out);
  return fit.converged ? exit_ok : exit_solver;
}

int cmd_selfcheck(const RunConfig& cfg, bool corrupt_xi) {
  CheckOptions options;
  options.n_random = cfg.check_points;
  options.seed = cfg.seed;
  options.corrupt_xi = corrupt_xi;
  options.threads = cfg.threads;
  const CheckReport report = run_selfcheck(cfg.system, options);
  for (const auto& line : report.lines) {
    std::printf("[%s] %s (worst %.3e, tolerance %.1e)\n", line.passed ? "PASS" : "FAIL",
                line.name.c_str(), line.worst, line.tolerance);
  }
  return report.all_passed() ? exit_ok : exit_check;
}

int cmd_oracle(const RunConfig& cfg) {
  const Complex linear = transmission(cfg.system, cfg.drive, cfg.probe.omega_p).t;
  const Complex oracle = two_tone_oracle(cfg.system, cfg.drive, cfg.probe);
  std::cout << "linear_response_t = " << format_double(linear.real()) << " "
            << format_double(linear.imag()) << "i  |t| = " << format_double(std::abs(linear))
            << "\n";
  std::cout << "two_tone_t       = " << format_double(oracle.real()) << " "
            << format_double(oracle.imag()) << "i  |t| = " << format_double(std::abs(oracle))
            << "\n";
  std::cout << "abs_difference   = " << format_double(std::abs(linear - oracle)) << "\n";
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driven three-level emitter in a 1D transmission line"};
  app.set_version_flag("--version", std::string("wqed ") + version);
  app.require_subcommand(1);

  Overrides o;
  auto* dressed = app.add_subcommand("dressed", "dressed energies, overlaps, sidebands");
  auto* populations = app.add_subcommand("populations", "stationary dressed populations");
  auto* map = app.add_subcommand("map", "transmission map over drive and probe");
  map->add_flag("--matrix", o.matrix, "also write the |t| matrix block");
  auto* sidebands = app.add_subcommand("sidebands", "sideband table at one drive point");
  auto* fit = app.add_subcommand("fit", "two-level transmission fit");
  fit->add_option("--data", o.data_path, "trace data file");
  auto* selfcheck = app.add_subcommand("selfcheck", "internal consistency suites");
  selfcheck->add_flag("--corrupt-xi", o.corrupt_xi,
                      "negative control: corrupt the damping tensor");
  auto* oracle = app.add_subcommand("oracle", "two-tone oracle vs linear response");
  for (auto* cmd : {dressed, populations, map, sidebands, fit, selfcheck, oracle}) {
    add_common_flags(cmd, o);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    const RunConfig cfg = assemble(o);
    if (dressed->parsed()) return cmd_dressed(cfg);
    if (populations->parsed()) return cmd_populations(cfg);
    if (map->parsed()) return cmd_map(cfg);
    if (sidebands->parsed()) return cmd_sidebands(cfg);
    if (fit->parsed()) return cmd_fit(cfg);
    if (selfcheck->parsed()) return cmd_selfcheck(cfg, o.corrupt_xi);
    if (oracle->parsed()) return cmd_oracle(cfg);
    return exit_config;
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_config;
  } catch (const ValidationError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_config;
  } catch (const SolverError& err) {
    std::cerr << "solver error: " << err.what() << "\n";
    return exit_solver;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_solver;
  }
}
