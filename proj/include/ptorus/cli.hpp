#pragma once

#include "ptorus/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace ptorus {

/// Exit codes of the command line tool.
enum ExitCode : int { exit_pass = 0, exit_fail = 1, exit_error = 2 };

/// <out>/<command>-<map>-<weight>-<hash of command and config>, created with the config
/// written to config.txt inside.
std::filesystem::path prepare_run_dir(const std::string& command, const RunConfig& c);

int cmd_propagate(const RunConfig& c, const std::filesystem::path& dir, std::ostream& log);
int cmd_check(const RunConfig& c, const std::filesystem::path& dir, std::ostream& log);
int cmd_bounds(const RunConfig& c, const std::filesystem::path& dir, std::ostream& log);
int cmd_duality(const RunConfig& c, const std::filesystem::path& dir, std::ostream& log);
int cmd_spectrum(const RunConfig& c, const std::filesystem::path& dir, std::ostream& log);

/// Runs a command by name; library errors are reported on err and mapped to exit_error.
int run_command(const std::string& command, const RunConfig& c, std::ostream& log, std::ostream& err);

} // namespace ptorus
