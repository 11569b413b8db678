#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "wqed/sweep.hpp"
#include "wqed/twolevel.hpp"

namespace wqed {

// Aggregated run configuration, filled from an INI-style config file
// ([section] / key = value) and overridden by command-line flags.
struct RunConfig {
  SystemParams system;
  DriveConfig drive;
  ProbeConfig probe;
  SweepSpec sweep;
  FitSetup fit_setup;
  TwoLevelFitParams fit_guess;
  std::string fit_data_path;
  std::string output_directory = ".";
  std::string basename = "run";
  bool write_matrix_block = false;
  std::optional<std::string> timestamp;  // omitted by default: outputs stay reproducible
  std::uint64_t seed = 1;
  int threads = 0;
  int check_points = 20;
};

// Parses and validates; throws ConfigError carrying the offending line number
// for unknown sections, unknown keys, bad values, and duplicate keys.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace wqed
