#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "torus/io.hpp"
#include "torus/minimizer.hpp"

namespace torus::cli {

inline const std::vector<std::string> kCommands{"kernel-table", "lattice", "energy",  "minimize",
                                                "verify-1d",    "verify-2d", "certify"};

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kVerificationFailed = 1;
inline constexpr int kUsageError = 2;

/// Thrown for anything that should end in exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fully resolved invocation.
struct RunConfig {
  std::string command;
  KernelSpec kernel;
  std::optional<int> N, L, K;
  MinimizeOptions minimize;
  /// Verdict tolerance; unset picks the per-dimension default.
  std::optional<double> tolerance;
  double lambda = 0.1;
  /// lattice / energy: which configuration to build.
  std::string lattice = "auto";
  /// energy: configuration file instead of a generated lattice.
  std::string input;
  std::string out;
  std::set<std::string> formats{"json"};
};

Json to_json(const RunConfig& config);

/// Parses argv (flags override --config). Throws UsageError on bad input;
/// returns nullopt when help or version text was printed.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

/// Executes the command and writes the requested artifacts. Returns the exit
/// code; messages go to `err`, the JSON document goes to `out` when no output
/// path is set.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run with the exit-code contract applied to every failure.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace torus::cli
