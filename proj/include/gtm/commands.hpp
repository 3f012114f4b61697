#pragma once

#include "gtm/config.hpp"
#include "gtm/dynamics.hpp"

#include <ostream>
#include <string>

namespace gtm {

/// "gtm <subcommand> key=expression ..." for the `#` line of emitted CSV.
std::string describe(const RunConfig& cfg);

/// Ensemble settings shared by simulate and histogram.
EnsembleSpec ensemble_spec(const RunConfig& cfg);

/// Runs one parameterized subcommand and writes its result to `out`.
void run_subcommand(const RunConfig& cfg, std::ostream& out);

}  // namespace gtm
