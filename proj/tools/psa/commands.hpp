#pragma once

namespace psa::cli {

/// Builds the argument parser, dispatches one subcommand, and maps failures
/// to exit codes: 0 success (and thresholds met), 1 failed threshold gate,
/// 2 usage or runtime error.
int run_cli(int argc, char** argv);

}  // namespace psa::cli
