#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "oce/errors.hpp"

namespace oce::cli {

// Process exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSingular = 3;
inline constexpr int kExitCertification = 4;

int exit_code_for(ErrorKind kind);

/// Runs the `oce` command line on `args` (program name excluded). Reports go
/// to `out`, diagnostics to `err`; the return value is the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oce::cli
