#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wqed/params.hpp"

namespace wqed {

struct CheckOptions {
  int n_random = 20;
  std::uint64_t seed = 1;
  bool corrupt_xi = false;  // negative control: flip one damping-tensor sign
  int threads = 0;
};

struct CheckLine {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // worst observed deviation
  double tolerance = 0.0;
};

struct CheckReport {
  std::vector<CheckLine> lines;
  bool all_passed() const;
};

// Runs the built-in consistency suites: stationary solver vs time-evolution
// oracle, linear response vs two-tone oracle, sideband closed form vs full
// response, and the exact two-level reduction vs the Bloch closed form.
CheckReport run_selfcheck(const SystemParams& p, const CheckOptions& options = {});

}  // namespace wqed
