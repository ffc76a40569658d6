#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "tetra/cli/config.hpp"

namespace tetra::cli {

// exit codes: scientific failure is kept apart from operational failure
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitScientificFail = 2;

struct Outcome {
  int exit_code = kExitPass;
  std::filesystem::path report;  // main report (the index file for batches)
  std::vector<std::filesystem::path> files;
  std::string summary;
};

// Executes the command and writes its artifacts into config.output_dir.
Outcome execute(const RunConfig& config);

// cheap precondition checks beyond parsing (tetragon and grid construction)
void check_preconditions(const RunConfig& config);

// full command line: returns the process exit code
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tetra::cli
