// Batch commands behind the CLI.  Each command runs one verification suite
// from a RunConfig, writes a JSON summary + CSV sweep + two-column plot-data
// file into the configured output directory, and returns the process exit
// code: 0 all checks passed, 1 tolerance violated.  Configuration problems
// throw ConfigError (exit 2) and evaluation outside a chart's domain throws
// std::domain_error (exit 3); the CLI maps both.

#pragma once

#include "carlemanlab/config.hpp"

namespace carlemanlab {

int cmd_geometry_check(const RunConfig& cfg);
int cmd_pseudoconvexity(const RunConfig& cfg);
int cmd_carleman(const RunConfig& cfg);
int cmd_kerr_certificate(const RunConfig& cfg);
int cmd_vanishing_orders(const RunConfig& cfg);

}  // namespace carlemanlab
