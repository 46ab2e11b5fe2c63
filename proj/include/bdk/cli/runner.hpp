#pragma once

#include <exception>
#include <iosfwd>
#include <string>

#include "bdk/cli/config.hpp"

namespace bdk::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 1,     // I/O, parse or validation
    kNoConvergence = 2,  // numerical non-convergence
    kIdentityFailed = 3, // an identity check exceeded its tolerance
};

struct RunResult {
    int code = kOk;
    std::string text; // rendered document, csv or json
};

/// Executes the command. Library errors propagate; see exit_code_for.
RunResult execute(const RunConfig& cfg);

/// Maps a library or I/O exception to an exit code.
int exit_code_for(const std::exception& e);

/// execute + write to cfg.out (or `out`) + diagnostics on `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace bdk::cli
