#pragma once

// Batch commands behind the command-line tool. Each command writes result.json plus CSV
// artifacts into the configured output directory.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "balayage/config.hpp"

namespace balayage {

enum class Command : std::uint8_t { discretize, sweep, equilibrium, gauss, converge_up, converge_down, verify };

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitSolver = 2;
inline constexpr int kExitVerification = 3;

std::optional<Command> parse_command(const std::string& name);
std::string command_name(Command c);
std::vector<std::string> command_names();

/// Library version recorded in every report.
std::string version();

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<std::string> files;  ///< artifacts written, relative to the output directory
  std::string summary;             ///< one line for the terminal
  std::string error;               ///< set when exit_code != 0 because of an exception
};

/// Runs one command. Validation and solver failures are reported through the exit code and,
/// where possible, an error.json artifact; they do not escape as exceptions.
RunOutcome run(Command command, const RunConfig& cfg);

/// Machine-readable error document: {"schema": 1, "error": kind, "violations": [...]}.
nlohmann::json error_json(const std::string& kind, const std::vector<std::string>& messages);

}  // namespace balayage
