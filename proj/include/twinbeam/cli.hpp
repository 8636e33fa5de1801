#pragma once

// Command-line front end: gain, simulate, fit, witness and sweep. Data goes to
// files under --out; stderr carries logs, stdout only help text.

#include <ostream>
#include <string>
#include <vector>

namespace twinbeam::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_runtime = 1,
  exit_usage = 2,
  exit_parse = 3,
  exit_underdetermined = 4,
  exit_max_iterations = 5,
  exit_io = 6,
  exit_unphysical = 7,
  exit_invalid_argument = 8,
  exit_insufficient_data = 9,
};

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace twinbeam::cli
