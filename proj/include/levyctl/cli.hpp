#pragma once

namespace levyctl::cli {

enum ExitCode { Ok = 0, ValidationFailure = 2, SolverFailure = 3, VerificationFailure = 4 };

/// Entry point of the levyctl command line tool.
int run(int argc, const char* const* argv);

}  // namespace levyctl::cli
