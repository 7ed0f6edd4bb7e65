#pragma once

#include <string>

#include "config.hpp"

namespace msl::cli {

enum ExitCode : int { ok = 0, config_error = 1, hypothesis_failure = 2, verification_failure = 3 };

/// What a command produces: the document for --output (or stdout), its exit
/// code and a one-line diagnostic for stderr (empty when there is nothing to say).
struct CommandResult {
    std::string output;
    int exit_code = ok;
    std::string diagnostic;
};

CommandResult cmd_check(const RunConfig& cfg);
CommandResult cmd_solve(const RunConfig& cfg);
CommandResult cmd_zeros(const RunConfig& cfg);
CommandResult cmd_wronskian(const RunConfig& cfg);
CommandResult cmd_separation(const RunConfig& cfg);
CommandResult cmd_comparison(const RunConfig& cfg);
CommandResult cmd_verify(const RunConfig& cfg);

}  // namespace msl::cli
