#include "dnl/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dnl/errors.hpp"

namespace dnl {

namespace fs = std::filesystem;

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string header_block(const Exponents& e, std::uint64_t config_hash, std::uint64_t seed) {
  std::ostringstream o;
  auto line = [&](const char* k, double v) { o << "# " << k << " = " << format_number(v) << "\n"; };
  line("m", e.m());
  line("p", e.p());
  o << "# n = " << e.n() << "\n";
  line("q", e.q());
  line("gamma", e.gamma());
  line("m_c", e.m_c());
  line("p_c", e.p_c());
  line("delta_p", e.delta_p());
  line("alpha", e.alpha());
  line("theta", e.theta());
  line("m_star", e.m_star());
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
  o << "# config_hash = " << hash << "\n";
  o << "# seed = " << seed << "\n";
  return o.str();
}

void write_text(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + file.string() + "'");
  out << text;
  if (!out) throw ValidationError("write failed for '" + file.string() + "'");
}

void write_series_csv(const fs::path& file, const DiagnosticsSeries& series, const std::string& header) {
  std::ostringstream o;
  o << header;
  const auto& cols = DiagnosticsSeries::columns();
  for (std::size_t c = 0; c < cols.size(); ++c) o << (c ? "," : "") << cols[c];
  o << "\n";
  for (const SeriesRow& row : series.rows()) {
    for (std::size_t c = 0; c < cols.size(); ++c) o << (c ? "," : "") << format_number(column_value(row, cols[c]));
    o << "\n";
  }
  write_text(file, o.str());
}

namespace {

struct Csv {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
};

Csv read_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot read '" + file.string() + "'");
  Csv csv;
  std::string line;
  int lineno = 0;
  bool have_names = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!have_names) {
      csv.names = cells;
      have_names = true;
      continue;
    }
    if (cells.size() != csv.names.size())
      throw ValidationError(file.string() + ":" + std::to_string(lineno) + ": wrong number of fields");
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const char* b = cells[i].data();
      const char* e = b + cells[i].size();
      auto [ptr, ec] = std::from_chars(b, e, row[i]);
      if (ec != std::errc() || ptr != e)
        throw ValidationError(file.string() + ":" + std::to_string(lineno) + ": bad number '" + cells[i] + "'");
    }
    csv.rows.push_back(std::move(row));
  }
  if (!have_names) throw ValidationError("'" + file.string() + "' has no header row");
  return csv;
}

}  // namespace

std::vector<SeriesRow> read_series_csv(const fs::path& file) {
  const Csv csv = read_csv(file);
  for (const auto& name : DiagnosticsSeries::columns())
    if (std::find(csv.names.begin(), csv.names.end(), name) == csv.names.end())
      throw ValidationError("'" + file.string() + "' lacks column '" + name + "'");
  std::vector<SeriesRow> rows;
  for (const auto& values : csv.rows) {
    SeriesRow r;
    for (std::size_t c = 0; c < csv.names.size(); ++c) set_column_value(r, csv.names[c], values[c]);
    rows.push_back(r);
  }
  return rows;
}

void write_snapshots_csv(const fs::path& file, const std::vector<Snapshot>& snaps, const RadialGrid& grid,
                         const std::string& header) {
  std::ostringstream o;
  o << header << "tau,cell,r,u\n";
  const auto r = grid.centers();
  for (const Snapshot& s : snaps)
    for (std::size_t i = 0; i < s.u.size(); ++i)
      o << format_number(s.tau) << "," << i << "," << format_number(r[i]) << "," << format_number(s.u[i]) << "\n";
  write_text(file, o.str());
}

std::vector<Snapshot> read_snapshots_csv(const fs::path& file, std::size_t cells) {
  const Csv csv = read_csv(file);
  if (csv.names != std::vector<std::string>{"tau", "cell", "r", "u"})
    throw ValidationError("'" + file.string() + "' is not a snapshot file");
  std::vector<Snapshot> out;
  for (const auto& row : csv.rows) {
    const auto cell = static_cast<std::size_t>(row[1]);
    if (cell == 0) out.push_back(Snapshot{row[0], {}});
    if (out.empty() || out.back().tau != row[0] || cell != out.back().u.size())
      throw ValidationError("'" + file.string() + "': snapshot rows out of order at tau = " + format_number(row[0]));
    out.back().u.push_back(row[3]);
  }
  for (const auto& s : out)
    if (s.u.size() != cells)
      throw ValidationError("'" + file.string() + "': snapshot at tau = " + format_number(s.tau) + " has " +
                            std::to_string(s.u.size()) + " cells, grid has " + std::to_string(cells));
  return out;
}

void write_json(const fs::path& file, const nlohmann::ordered_json& doc) {
  write_text(file, doc.dump(2) + "\n");
}

}  // namespace dnl
