#pragma once

#include <set>
#include <string>
#include <vector>

#include "wqed/response.hpp"

namespace wqed {

enum class DriveScale { rabi10, dbm };
enum class DriveFrequencyMode { half_omega20, omega10, explicit_value };

enum class SweepOutput {
  transmission_map,
  dressed_energies,
  overlaps,
  populations,
  sidebands,
  self_transmission,
};

struct AxisSpec {
  double min = 0.0;
  double max = 1.0;
  int n = 2;
};

struct SweepSpec {
  AxisSpec drive_axis;                  // rabi10 GHz or dBm depending on scale
  DriveScale drive_scale = DriveScale::rabi10;
  AxisSpec probe_axis{6.6, 8.1, 2};     // GHz; used by transmission_map
  DriveFrequencyMode drive_frequency_mode = DriveFrequencyMode::half_omega20;
  double drive_frequency = 0.0;         // GHz, explicit mode only
  std::set<SweepOutput> outputs{SweepOutput::transmission_map};
  std::optional<PowerCalibration> calibration;  // required for dbm scale

  double resolve_drive_frequency(const SystemParams& p) const;
  void validate() const;
};

// Flat row-major arrays per requested output; cells that failed to solve are
// flagged in `ok` rather than poisoning the sweep with NaN.
struct SweepResult {
  SystemParams params;
  SweepSpec spec;
  std::vector<std::string> metadata;  // echoed verbatim as '#' lines on export

  std::vector<double> drive_values;   // axis coordinates in the chosen scale
  std::vector<double> drive_rabi10;   // resolved Omega_R10/2pi per drive point
  std::vector<double> probe_ghz;

  // transmission map, [drive][probe] row-major
  std::vector<Complex> t;
  std::vector<std::uint8_t> ok;

  // per drive point
  std::vector<double> energies;        // 3 per point, GHz relative to rotating frame
  std::vector<double> overlap_rows;    // 9 per point, |<j|mu>|^2 row-major (j, mu)
  std::vector<double> population_rows; // 9 per point: p_g p_m p_e re/im gm ge me
  std::vector<Sideband> sideband_rows; // 6 per point
  std::vector<Complex> self_t;         // drive-tone transmission
  std::vector<std::uint8_t> self_ok;
};

// Evaluates the grid: diagonalize -> stationary -> transmission per cell.
// Deterministic for any worker count (threads = 0 picks hardware concurrency).
SweepResult run_sweep(const SystemParams& p, const SweepSpec& spec, int threads = 0);

// Long-form delimited text, one row per cell:
//   drive_value, probe_ghz, re_t, im_t, abs_t, ok
// preceded by '#' metadata lines. Deterministic; floats are shortest
// round-trip representations, so export(parse(export(x))) is byte-identical.
std::string export_long_csv(const SweepResult& result);
SweepResult parse_long_csv(const std::string& text);

// Self-describing |t| matrix block for heatmap tools.
std::string export_matrix_block(const SweepResult& result);

// Per-drive-point tables for the non-map outputs.
std::string export_drive_table(const SweepResult& result, SweepOutput which);

const char* to_string(SweepOutput o);
std::optional<SweepOutput> sweep_output_from_string(const std::string& name);

}  // namespace wqed
