#pragma once

#include <iosfwd>
#include <string>

#include "pqs/config.hpp"

namespace pqs {

// Exit codes of the run() entry point.
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;        // config or solver error
inline constexpr int kExitCheckFailed = 2;  // an asserted check did not hold

/// Executes one command against a validated configuration, writing the
/// artifact tree under the configured output directory. Known commands:
/// solve, continue, direct, oracle-torsion, oracle-theta, probe-regime,
/// probe-sobolev, probe-compare, probe-nonexistence, verify-all.
int run_command(const std::string& command, const RunConfig& config, std::ostream& log);

}  // namespace pqs
