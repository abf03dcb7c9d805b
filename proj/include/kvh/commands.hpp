#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kvh/galilei_suite.hpp"
#include "kvh/scenario.hpp"

namespace kvh {

std::string_view version();

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int verification_failed = 1;
inline constexpr int config_error = 2;
inline constexpr int numerical_abort = 3;
}  // namespace exit_code

struct CheckOutcome {
  CheckSpec spec;
  double value = 0.0;
  bool pass = false;
};

struct CommandResult {
  int exit_code = exit_code::ok;
  std::map<std::string, double> metrics;
  std::vector<CheckOutcome> checks;
  std::vector<std::string> warnings;
};

/// Runs the symbolic suite, prints the report to `out` and, when `csv_path`
/// is non-empty, writes relation_id,status,residual rows there.
int cmd_check_algebra(SuiteSelection selection, const std::string& csv_path, std::ostream& out);

/// Executes a validated scenario, writing its artifacts under `out_dir` and a
/// human-readable summary to `out`. Throws ConfigError and NumericalAbort.
CommandResult execute(const Scenario& sc, const std::string& out_dir, std::ostream& out);

/// Loads `cfg_path`, requires its command to be `expected`, executes it and
/// maps failures onto exit codes; messages go to `err`.
int run_scenario_file(Command expected, const std::string& cfg_path, const std::string& out_dir, std::ostream& out,
                      std::ostream& err);

}  // namespace kvh
