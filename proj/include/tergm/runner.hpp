#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace tergm {

// Command-line overrides; anything unset falls back to the config file.
struct CliOverrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

// Parses + validates the JSON run config, executes one batch command, and
// publishes artifacts atomically under the output directory.  Throws the
// project error types; run_cli below maps them onto exit codes.
void execute(const std::string& command, const std::string& config_path,
             const CliOverrides& overrides);

// Full CLI behavior: execute, catch, emit machine-readable error JSON.
// Exit codes: 0 ok, 2 config schema, 3 data parse/validation,
// 4 estimation failure, 1 anything else.
int run_cli(const std::string& command, const std::string& config_path,
            const CliOverrides& overrides);

bool is_known_command(const std::string& command);

}  // namespace tergm
