#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "config.hpp"

namespace fracrit::app {

enum ExitCode : int {
    exit_ok = 0,
    exit_checks_failed = 1,
    exit_no_descent = 2,
    exit_config = 3,
    exit_other = 4,
};

struct CommandOptions {
    std::optional<std::string> config;  // path; canonical instance when absent
    std::optional<std::string> out;     // directory, or a .json file path
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string in;                     // decompose input snapshot
    bool quiet = false;                 // suppress the stdout summary
};

// Each command writes its outputs and returns the process exit code.
// Exceptions other than failed checks propagate to run_command.
int cmd_calibrate(const RunConfig& cfg, const CommandOptions& o);
int cmd_constants(const RunConfig& cfg, const CommandOptions& o);
int cmd_verify(const RunConfig& cfg, const CommandOptions& o);
int cmd_decompose(const RunConfig& cfg, const CommandOptions& o);
int cmd_solve(const RunConfig& cfg, const CommandOptions& o);

// Loads the config, applies overrides, dispatches, and maps errors to exit codes.
int run_command(const std::string& name, const CommandOptions& o);

// Per-check records of the verify suites, exposed for tests.
nlohmann::ordered_json verify_suites(const RunConfig& cfg);

} // namespace fracrit::app
