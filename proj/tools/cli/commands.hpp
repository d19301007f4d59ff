#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace robustq::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kUnestimable = 2 };

struct CommandOptions {
  std::optional<std::filesystem::path> input;
  std::optional<std::filesystem::path> output;  // stdout when unset
  std::optional<std::uint64_t> seed;
  std::optional<int> grid_points;
  std::optional<double> alpha_max;
  bool assert_invariants = false;
  bool paper_convention = false;
  unsigned threads = 1;
  int verbosity = 0;
};

// Each command writes its table or document to opt.output (or `out`) and returns an exit code.
// Configuration problems throw ConfigError.
int cmd_rdr_family(const CommandOptions& opt, std::ostream& out, std::ostream& log);
int cmd_rdr_renewal(const CommandOptions& opt, std::ostream& out, std::ostream& log);
int cmd_bound_scheduling(const CommandOptions& opt, std::ostream& out, std::ostream& log);
int cmd_bound_reneging(const CommandOptions& opt, std::ostream& out, std::ostream& log);
int cmd_simulate(const CommandOptions& opt, std::ostream& out, std::ostream& log);

// Relative output paths land under $ROBUSTQ_OUTPUT_DIR when that variable is set.
std::filesystem::path resolve_output(const std::filesystem::path& p);

// Full command line entry point (parsing, dispatch, error reporting).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace robustq::cli
