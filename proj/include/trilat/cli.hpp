#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trilat::cli {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum ExitCode : int {
  kAllPassed = 0,
  kViolationFound = 1,
  kUsageError = 2,
};

enum class OutputFormat { json, csv, text };

/// Everything a run depends on, validated before any work starts.
struct RunConfig {
  std::string subcommand;  // e.g. "verify", "jacobsthal primorial"
  std::uint64_t range_from = 0;
  std::uint64_t range_to = 0;
  unsigned workers = 1;
  OutputFormat format = OutputFormat::json;
  std::optional<std::string> output_path;
  std::uint64_t sieve_limit = 0;  // 0: derive from the subcommand
  std::uint64_t sieve_cap = 0;
  bool orbit_reduction = false;
  bool quiet = false;
  bool timing = false;
};

/// Parses argv, runs one subcommand and writes its report. Results go to
/// `out` (or --output), diagnostics and progress to `err`.
/// Environment: TRILAT_WORKERS sets the default worker count and
/// TRILAT_SIEVE_CAP the largest prime table a run may build.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload for tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trilat::cli
