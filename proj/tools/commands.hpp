#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "output.hpp"

namespace bohmsim {

std::vector<std::string> const& command_names();

/// Runs one subcommand, writing artifacts into `out` and results into
/// `report`. Returns 0, or 1 when a checked property does not hold.
int run_command(std::string const& name, Config const& config, OutputDir& out, Report& report, std::ostream& log);

}  // namespace bohmsim
