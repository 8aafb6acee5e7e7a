#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace derham::cli {

enum class Command { cdf, simulate, compare, analyze, atoms, selftest };
enum class Format { csv, json };

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitGateFailed = 3;

struct RunConfig {
  Command command = Command::cdf;
  double u = 1.0;
  int level = 10;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 42;
  int workers = 1;
  int grid_level = 6;
  double tol = 1e-9;
  Format format = Format::json;
  std::optional<std::string> out;
  std::optional<std::string> x;
  bool timestamp = true;
};

std::string version();

/// Parses argv (program name first). Throws ParseError on bad input; the
/// help text is written to out and nullopt returned when --help is given.
std::optional<RunConfig> parse_args(const std::vector<std::string>& args, std::ostream& out);

/// Checks the numeric ranges each command needs; throws DomainError.
void validate(const RunConfig& config);

/// Runs a validated or unvalidated config. Output goes to config.out when
/// set, otherwise to out. Returns the process exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full entry point: parse, validate, run, map errors to exit codes.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace derham::cli
