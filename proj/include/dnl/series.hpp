// Time series of diagnostics sampled along a run.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dnl/functionals.hpp"
#include "dnl/grid.hpp"

namespace dnl {

struct SeriesRow {
  double tau = 0;
  double mass = 0;
  FunctionalSample f;
  double clipped_mass = 0;
};

struct SeriesMetadata {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  double m = 0, p = 0;
  int n = 0;
  GridSpec grid;
  double Dstar = 0;
  double eps = 0;
  double W0 = 1, W1 = 1;
};

class DiagnosticsSeries {
 public:
  SeriesMetadata meta;

  /// CSV column names in output order.
  static const std::vector<std::string>& columns();

  /// Rejects non-increasing tau.
  void append(const SeriesRow& row);

  const std::vector<SeriesRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  std::vector<double> tau() const { return column("tau"); }
  /// Any CSV column by name; ValidationError for unknown names.
  std::vector<double> column(std::string_view name) const;

 private:
  std::vector<SeriesRow> rows_;
};

double column_value(const SeriesRow& row, std::string_view name);
void set_column_value(SeriesRow& row, std::string_view name, double value);

}  // namespace dnl
