#pragma once

#include <iosfwd>

namespace onevision::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Parses `run | sweep | verify-lti | serve` and executes it. Returns 0 on
/// success, 1 when the work itself failed and 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Sets the log level from ONEVISION_LOG (trace, debug, info, warn, error,
/// critical, off); defaults to warn.
void init_logging();

}  // namespace onevision::cli
