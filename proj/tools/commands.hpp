#pragma once

#include <string>
#include <vector>

namespace gitseg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitInvalid = 2;

inline constexpr const char* kDatasetEnv = "GITSEG_DATASET_ROOT";

/// Entry point for `gitseg <subcommand> ...`. Diagnostics go to stderr;
/// data goes only to the files named by flags.
int run(int argc, const char* const* argv);

/// Convenience for in-process callers: args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace gitseg::cli
