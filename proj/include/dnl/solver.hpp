// Conservative explicit finite-volume scheme for the rescaled equation
//
//   u_tau = div( u grad c*(grad F'(u)) + u y )
//
// on radial shells with zero flux at r = 0 and r = r_max, plus initial data
// obeying the Barenblatt sandwich and the map back to original variables.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dnl/series.hpp"
#include "dnl/barenblatt.hpp"
#include "dnl/equilibrium.hpp"
#include "dnl/functionals.hpp"
#include "dnl/grid.hpp"

namespace dnl {

/// Regularized mobility G(s) = sign(s)((eps + |s|)^{p-1} - eps^{p-1}).
/// eps = 0 gives grad c*(s) = s|s|^{p-2}; G' = (p-1)(eps + |s|)^{p-2}.
double mobility(double s, double p, double eps);
double mobility_derivative(double s, double p, double eps);

enum class DriftForm {
  /// Drift written as -u G(s*_h) with s*_h the discrete gradient of -c, so
  /// the sampled equilibrium is an exact discrete steady state.
  balanced,
  /// Drift u r_{i+1/2} taken literally; equilibrium residual is O(h).
  edge,
};

struct SolverOptions {
  double safety = 0.4;
  /// Negative selects the default: h_min for p < 2, 0 otherwise.
  double eps_reg = -1.0;
  DriftForm drift = DriftForm::balanced;
  double min_dt = 1e-14;
  /// Throw when w leaves [W0 - tol, W1 + tol]; tol <= 0 disables.
  double sandwich_tol = 0.0;
};

struct TimeState {
  double tau = 0;
  DensityField field;
  long step_count = 0;
  double last_dt = 0;
  double clipped_mass = 0;
};

class Solver {
 public:
  Solver(const DiscreteEquilibrium& reference, SolverOptions options = {});

  const DiscreteEquilibrium& reference() const { return ref_; }
  const SolverOptions& options() const { return opt_; }
  double eps_reg() const { return eps_reg_; }

  /// Outward flux at interior edge j (between cells j and j+1).
  double flux(const DensityField& field, std::size_t edge) const;

  /// Largest stable step for the current field.
  double stable_dt(const DensityField& field) const;

  /// One explicit step of min(stable_dt, dt_max); returns the dt taken.
  double step(TimeState& state, double dt_max = 1e300) const;

  /// Quotient band enforced when options().sandwich_tol > 0.
  void set_sandwich(double W0, double W1) { W0_ = W0; W1_ = W1; }

 private:
  // Fills flux_ (per interior edge) and diag_ (per cell stiffness) for u.
  void evaluate(const std::vector<double>& u) const;

  const DiscreteEquilibrium& ref_;
  SolverOptions opt_;
  double eps_reg_;
  double W0_ = 0, W1_ = 1e300;
  std::vector<double> Gstar_, drift_edge_;
  mutable std::vector<double> psi_, f2_, flux_, diag_;
};

// ---------------------------------------------------------------------------
// Initial data

enum class InitShape { equilibrium, step, step_inverted };

std::optional<InitShape> parse_shape(const std::string& name);
std::string to_string(InitShape shape);

struct InitSpec {
  InitShape shape = InitShape::step;
  double D0 = 2.0;  // outer profile (smaller density)
  double D1 = 0.5;  // inner profile (larger density)
  double r0 = 1.0;
  double width = 0.25;
  /// Rescale the data to this mass; the sandwich is rechecked afterwards.
  std::optional<double> mass;

  bool operator==(const InitSpec&) const = default;
};

struct InitialData {
  DensityField field;
  double mass = 0;
  /// The profiles actually bounding the data (collapse to D0 for the
  /// equilibrium shape).
  double D0 = 1, D1 = 1;
};

/// u0(r) = u_{D(r)}(r) with log D interpolating from log D1 at the origin to
/// log D0 far out through a tanh step. Throws SandwichViolation with the
/// offending radius if u_{D0} <= u0 <= u_{D1} fails on the grid.
InitialData build_initial_data(const Exponents& e, GridPtr grid, const InitSpec& spec);

// ---------------------------------------------------------------------------
// Whole runs

struct SimulationConfig {
  double m = 4.0 / 3.0, p = 1.5;
  int n = 3;
  GridSpec grid;
  InitSpec init;
  double tau_end = 10.0;
  double cadence = 0.05;
  /// Field snapshots every this much tau; <= 0 keeps only the final field.
  double snapshot_cadence = 0.0;
  double eps = 0.1;  // regularization of the sampled functionals
  SolverOptions solver;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

struct Snapshot {
  double tau = 0;
  std::vector<double> u;
};

struct SimulationResult {
  DiagnosticsSeries series;
  std::vector<Snapshot> snapshots;
  SandwichBounds bounds;
  double Dstar_continuum = 0;
  double eps_reg = 0;
  long steps = 0;
  double max_grad_monitor = 0;
  double max_phi_eps = 0;
  std::shared_ptr<const DiscreteEquilibrium> reference;
};

SimulationResult simulate(const SimulationConfig& config);

/// Everything simulate() fixes before the first step (reference, bounds,
/// metadata) with an empty series; used to reload stored runs.
SimulationResult prepare_simulation(const SimulationConfig& config);

// ---------------------------------------------------------------------------
// Original variables

struct OriginalVariables {
  double t = 0;
  double R = 1;
  std::vector<double> x;    // cell centres
  std::vector<double> rho;  // densities
  std::vector<double> volumes;
};

/// t = (e^{delta tau} - 1)/delta, x = R y, rho = R^{-n} u with R = e^tau.
OriginalVariables to_original_variables(const Exponents& e, const RadialGrid& grid, double tau,
                                        std::span<const double> u);

/// Inverse map; recovers (tau, u) from an OriginalVariables record.
double tau_from_t(const Exponents& e, double t);
std::vector<double> to_rescaled_density(const Exponents& e, const OriginalVariables& ov);

}  // namespace dnl
