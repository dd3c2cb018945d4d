// Run configuration: plain-text `key = value` lines with dotted keys
// (grid.cells) or [section] headers, `#` comments.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dnl/solver.hpp"

namespace dnl {

struct RunConfig {
  double m = 0, p = 0;
  int n = 0;
  GridSpec grid;

  double tau_end = 0;
  double safety = 0.4;

  InitSpec init;

  double eps = 0;                 // reg.eps, regularization of the sampled functionals
  std::optional<double> eps_reg;  // reg.eps_reg, mobility regularization; auto when absent

  int ell_max = 4;
  std::vector<double> spectral_eps = {0.1};

  double cadence = 0;
  double snapshot_cadence = 0.5;
  std::string path;

  double r2_min = 0.995;
  std::uint64_t seed = 0;

  bool operator==(const RunConfig&) const = default;
};

/// Raw key -> value table; ValidationError names the line on syntax errors
/// and the key on duplicates.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Typed parse plus validation. Missing, unknown or out-of-range keys throw
/// ValidationError naming the key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& file);

void validate(const RunConfig& cfg);

/// Canonical text: every key, fixed order, doubles at 17 digits.
std::string serialize(const RunConfig& cfg);

/// FNV-1a of the canonical text.
std::uint64_t config_hash(const RunConfig& cfg);

SimulationConfig to_simulation(const RunConfig& cfg);

/// output.path, or DNL_OUTPUT_DIR/<leaf of output.path> when that variable
/// is set, so sweeps stay isolated.
std::filesystem::path output_dir(const RunConfig& cfg);

}  // namespace dnl
