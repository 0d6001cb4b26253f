#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uplift/family.hpp"
#include "uplift/price_system.hpp"

namespace uplift {

enum class Command { Solve, Price, Uplift, Eliminate, Verify, NuScan };
enum class OutputFormat { Json, Csv, Text };

struct RunConfig {
  Command command = Command::Solve;
  std::string instance_path;
  PriceMethod method = PriceMethod::CHP;
  GammaChoice gamma;
  std::vector<double> nu_grid{0.0, 0.5, 1.0};
  OutputFormat format = OutputFormat::Json;
  std::string out_path;  // empty: standard output
  double grid_step = 1.0;  // MWh, dispatch-feasible sampling in verify/eliminate
};

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitInfeasible = 2,
  kExitVerification = 3,
  kExitInternal = 4,
};

/// Runs one command; the report goes to `out` (or the configured file),
/// diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses the command line. Returns the config, or the exit code to use when
/// parsing ended the run (help, usage error).
struct ParsedArgs {
  std::optional<RunConfig> config;
  int exit_code = kExitOk;
};
ParsedArgs parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// parse_args followed by run.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace uplift
