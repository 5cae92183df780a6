#pragma once

#include <iosfwd>

namespace ecc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDivergence = 3;

// Default output directory when --out is not given.
inline constexpr const char* kOutputDirEnv = "ECC_OUTPUT_DIR";
inline constexpr const char* kDefaultOutputDir = "ecc-out";

// Subcommands: gen-data, train, evaluate, sweep, frontier, report.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ecc::cli
