#pragma once

#include <stdexcept>
#include <string>

namespace wqed {

// Invalid physical parameters or malformed inputs.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical failure (singular system, non-converging integrator, ...).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Config-file problem, carries the offending line number (1-based, 0 = file level).
struct ConfigError : std::runtime_error {
  int line;
  ConfigError(int line_, const std::string& msg)
      : std::runtime_error(line_ > 0 ? "config line " + std::to_string(line_) + ": " + msg
                                     : "config: " + msg),
        line(line_) {}
};

}  // namespace wqed
