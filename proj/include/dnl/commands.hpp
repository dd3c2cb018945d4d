// Subcommands behind the dnl_lab executable. Each returns the process exit
// code: 0 success, 2 bad input, 3 numerical failure, 4 failed check.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dnl/config.hpp"
#include "dnl/solver.hpp"

namespace dnl {

int cmd_profile(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_spectrum(const RunConfig& cfg, std::ostream& out);
int cmd_rates(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);
int cmd_check(const RunConfig& cfg, std::ostream& out);

/// Loads each config and runs `command` on it; several configs run
/// concurrently, each in its own output directory. Returns the largest exit
/// code. Errors are reported on `err` with the config file name.
int run_command(const std::string& command, const std::vector<std::filesystem::path>& configs, std::ostream& out,
                std::ostream& err);

/// Rebuilds a stored run (series.csv, snapshots.csv) on top of the
/// reference fixed by the config; rejects files from a different config.
SimulationResult load_run(const RunConfig& cfg);

}  // namespace dnl
