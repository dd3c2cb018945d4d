// Rate extraction and theorem-level checks on simulation output.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dnl/functionals.hpp"
#include "dnl/series.hpp"
#include "dnl/solver.hpp"
#include "dnl/spectral.hpp"

namespace dnl {

struct WindowPolicy {
  double r2_min = 0.995;
  /// Windows may not start before this fraction of the usable samples.
  double min_start_fraction = 0.5;
  std::size_t min_samples = 10;
  /// Values <= floor_rel * max, or <= floor_abs, count as converged.
  double floor_rel = 1e-12;
  double floor_abs = 1e-24;
};

struct RateFit {
  double rate = 0;
  double intercept = 0;  // log value at tau = 0 of the fitted line
  double tau_a = 0, tau_b = 0;
  std::size_t first = 0, last = 0;  // sample indices, inclusive
  double residual = 0;              // rms of log residuals
  double r_squared = 0;
  /// The column reached the floor; the fit uses the samples before it.
  bool floored = false;
  /// A window meeting the policy was found.
  bool accepted = false;
};

/// Least squares on log(value) against tau over the largest late suffix
/// whose r^2 meets the policy.
RateFit fit_exponential(std::span<const double> tau, std::span<const double> values, const WindowPolicy& policy = {});
RateFit fit_exponential(const DiagnosticsSeries& series, std::string_view column, const WindowPolicy& policy = {});

/// Least-squares slope of log y against log x over [first, last].
double loglog_slope(std::span<const double> x, std::span<const double> y, std::size_t first, std::size_t last);

struct Check {
  std::string name;
  bool pass = false;
  /// Signed margin, positive when the inequality holds.
  double slack = 0;
  std::string note;
};

/// Constants behind the reconstructed rate for one (eps, t0) choice.
struct ChainConstants {
  double eps = 0;
  double t0 = 0;
  double beta_tilde = 0;
  double eta = 0;
  ComparisonConstants cc;
  double kappa1 = 0;
  /// Empty when kappa2 beta~ >= 2 (not yet in the small-perturbation regime).
  std::optional<double> lambda;
};

/// Constants for quotients seen at tau >= t0 and the gap `gap`.
ChainConstants chain_constants(const SimulationResult& run, const GapResult& gap, double t0);

struct TheoremReport {
  bool at_floor = false;
  RateFit entropy_fit, l1_fit;
  double lambda_emp = 0;
  double lambda_theo = 0;
  std::optional<ChainConstants> best;
  double loglog_slope = 0;
  double loglog_target = 0;
  std::vector<Check> checks;
  bool pass() const;
};

/// Decay statements of the main theorem on a finished run. `gaps` holds the
/// Hardy-Poincare constants over the eps sweep (eps = 0 allowed for p >= 2);
/// lambda_theo is the best rate over gaps and snapshot times t0.
TheoremReport verify_theorem1(const SimulationResult& run, const std::vector<GapResult>& gaps,
                              const WindowPolicy& policy = {});

struct ChainReport {
  std::vector<Check> checks;
  std::size_t snapshots_checked = 0;
  std::size_t deferred = 0;
  bool pass() const;
};

/// Per-snapshot inequality chain for snapshots with tau >= t_from: linearized
/// log-Sobolev, entropy comparison, both claims and the composed nonlinear
/// inequality.
ChainReport verify_logsob_chain(const SimulationResult& run, const GapResult& gap, double t_from);

}  // namespace dnl
