// CSV and JSON artifacts. Numbers go out with 17 significant digits so that
// reloading a run reproduces it bit for bit.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dnl/config.hpp"
#include "dnl/solver.hpp"

namespace dnl {

std::string format_number(double x);

/// `# key = value` lines: exponents, provenance.
std::string header_block(const Exponents& e, std::uint64_t config_hash, std::uint64_t seed);

void write_text(const std::filesystem::path& file, const std::string& text);

void write_series_csv(const std::filesystem::path& file, const DiagnosticsSeries& series, const std::string& header);
/// Rows only; '#' lines are skipped. ValidationError names the file and line.
std::vector<SeriesRow> read_series_csv(const std::filesystem::path& file);

/// Long format: tau, cell, r, u.
void write_snapshots_csv(const std::filesystem::path& file, const std::vector<Snapshot>& snaps,
                         const RadialGrid& grid, const std::string& header);
std::vector<Snapshot> read_snapshots_csv(const std::filesystem::path& file, std::size_t cells);

void write_json(const std::filesystem::path& file, const nlohmann::ordered_json& doc);

}  // namespace dnl
