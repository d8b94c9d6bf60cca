#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sprox::checks {

struct CheckOptions {
  std::string filter;            ///< substring match on check names; empty = all
  double lipschitz_scale = 1.0;  ///< negative-control knob for the solvers
  std::ostream* log = nullptr;   ///< per-case details (seed logs etc.)
};

struct CheckOutcome {
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::string detail;
};

std::vector<std::string> check_names();

/// Runs every check matching the filter; exceptions inside a check are
/// caught and reported as failures.
std::vector<CheckOutcome> run_checks(const CheckOptions& options);

bool all_passed(const std::vector<CheckOutcome>& outcomes);

}  // namespace sprox::checks
