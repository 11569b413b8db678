#pragma once

#include <numbers>

namespace wqed {

// Public interfaces quote frequencies and rates in cycles units (GHz, i.e.
// omega/2pi); all internal math runs in angular units (rad/ns).
inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double to_angular(double cycles_ghz) { return two_pi * cycles_ghz; }
constexpr double to_cycles(double angular) { return angular / two_pi; }

}  // namespace wqed
