#pragma once

#include <ostream>
#include <string>

#include "hartree/cli/config.hpp"

namespace hartree::cli {

enum ExitCode { Ok = 0, ConfigFailure = 2, AccuracyFailure = 3, ConvergenceFailure = 4 };

/// Runs one command on a fully merged config, writing artifacts to config.output_dir and a
/// one-object JSON summary to `out`. Errors are reported on `err` as JSON and mapped to
/// exit codes.
int dispatch(const std::string& command, const Json& config, std::ostream& out, std::ostream& err);

/// Command-line entry: `hartree <command> [--config file] [--n N] [--alpha A] [--seed S]
/// [--out DIR] [--set key.path=value ...]`. Flags override the file.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hartree::cli
