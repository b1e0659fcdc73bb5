#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace dicelab::cli {

inline constexpr const char* kVersion = "dicelab 0.1.0";

/// Bad invocation: unknown subcommand or flag, malformed values. Mapped to
/// exit code 2; domain errors from the library exit with 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommandRequest {
  std::string subcommand;
  std::map<std::string, std::string> flags;  // raw flag/value echo
  std::vector<std::string> positional;
  std::string output_format = "json";  // json | csv | text
};

struct CommandReport {
  CommandRequest request;
  nlohmann::json payload;
  std::string version = kVersion;
  double wall_time_seconds = 0;
};

/// Validates argv (without the program name) into a request.
CommandRequest parse(const std::vector<std::string>& args);

/// Dispatches a valid request to the owning module.
CommandReport execute(const CommandRequest& request);

/// Renders the report in the request's output format (single JSON object,
/// CSV with a header row, or key: value text).
std::string render(const CommandReport& report);

/// Full program: parse, execute, print to stdout. Returns the exit code
/// (0 success, 1 domain error, 2 usage error); never throws.
int run(int argc, char** argv);

}  // namespace dicelab::cli
