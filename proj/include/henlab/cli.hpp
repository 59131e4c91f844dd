#pragma once

#include <string>
#include <vector>

namespace henlab {

// Dispatches one subcommand (orbit, walk-drift, cones-verify, collar-verify,
// chain, mass-escape, filled-julia, disjointness, render, eq5-check) and
// writes its artifacts. Parameters come from flags, optionally merged over a
// JSON config (--config); flags win, unknown config keys are rejected.
// Exit codes: 0 success, 1 a verification command detected a violation,
// 2 usage or config error.
int run_command(const std::vector<std::string>& args);

}  // namespace henlab
