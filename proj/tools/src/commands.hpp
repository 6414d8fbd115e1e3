#pragma once

namespace netpot::cli {

/// Parses argv, runs one subcommand and returns the process exit code:
/// 0 success, 1 computation error, 2 usage error.
int dispatch(int argc, char** argv);

} // namespace netpot::cli
