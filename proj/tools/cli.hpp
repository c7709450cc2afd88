#pragma once

#include <string>
#include <vector>

namespace qlab::cli {

enum ExitCode { kOk = 0, kInvalidConfig = 2, kNotConverged = 3, kVerificationFailed = 4 };

inline constexpr int kSchemaVersion = 1;

// Runs one subcommand; args excludes the program name. Reports go to the
// output directory (--out, else $QLAB_OUT_DIR, else ./qlab_out) and the
// main JSON report is echoed to stdout.
int run_command(const std::vector<std::string>& args);

}  // namespace qlab::cli
