#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace adastorm {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Self-test suite behind `storm_bench check`: the sandwich-inequality sweep,
/// finite-difference gradient checks on every synthetic problem, the
/// noiseless fixed-point property of the STORM recursions, gradient-table
/// mean consistency, and enumeration of the finite-sum estimators'
/// conditional means.
std::vector<CheckResult> run_property_checks(std::uint64_t seed = 2024);

}  // namespace adastorm
