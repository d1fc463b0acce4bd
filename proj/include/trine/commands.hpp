#pragma once

#include <iosfwd>

#include "trine/run_config.hpp"

namespace trine {

/// Executes a parsed subcommand. Regular output goes to `out`, the effective
/// configuration, progress and diagnostics to `log`. Returns the exit status.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& log);

/// parse_config + run, mapping every error to a nonzero status.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& log);

}  // namespace trine
