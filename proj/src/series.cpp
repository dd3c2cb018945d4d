#include "dnl/series.hpp"

#include "dnl/errors.hpp"

namespace dnl {

const std::vector<std::string>& DiagnosticsSeries::columns() {
  static const std::vector<std::string> names = {
      "tau",   "mass",  "E_rel",       "I_rel",   "E_lin", "I_lin", "I0_lin",
      "I_eps", "I_gamma_eps", "L1_dist", "w_min", "w_max", "clipped_mass"};
  return names;
}

double column_value(const SeriesRow& r, std::string_view name) {
  if (name == "tau") return r.tau;
  if (name == "mass") return r.mass;
  if (name == "E_rel") return r.f.E_rel;
  if (name == "I_rel") return r.f.I_rel;
  if (name == "E_lin") return r.f.E_lin;
  if (name == "I_lin") return r.f.I_lin;
  if (name == "I0_lin") return r.f.I0_lin;
  if (name == "I_eps") return r.f.I_eps;
  if (name == "I_gamma_eps") return r.f.I_gamma_eps;
  if (name == "L1_dist") return r.f.L1_dist;
  if (name == "w_min") return r.f.w_min;
  if (name == "w_max") return r.f.w_max;
  if (name == "clipped_mass") return r.clipped_mass;
  throw ValidationError("unknown series column '" + std::string(name) + "'");
}

void set_column_value(SeriesRow& r, std::string_view name, double v) {
  if (name == "tau") r.tau = v;
  else if (name == "mass") r.mass = v;
  else if (name == "E_rel") r.f.E_rel = v;
  else if (name == "I_rel") r.f.I_rel = v;
  else if (name == "E_lin") r.f.E_lin = v;
  else if (name == "I_lin") r.f.I_lin = v;
  else if (name == "I0_lin") r.f.I0_lin = v;
  else if (name == "I_eps") r.f.I_eps = v;
  else if (name == "I_gamma_eps") r.f.I_gamma_eps = v;
  else if (name == "L1_dist") r.f.L1_dist = v;
  else if (name == "w_min") r.f.w_min = v;
  else if (name == "w_max") r.f.w_max = v;
  else if (name == "clipped_mass") r.clipped_mass = v;
  else throw ValidationError("unknown series column '" + std::string(name) + "'");
}

void DiagnosticsSeries::append(const SeriesRow& row) {
  if (!rows_.empty() && !(row.tau > rows_.back().tau))
    throw ValidationError("series tau must be strictly increasing");
  rows_.push_back(row);
}

std::vector<double> DiagnosticsSeries::column(std::string_view name) const {
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(column_value(r, name));
  return out;
}

}  // namespace dnl
