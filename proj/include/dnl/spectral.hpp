// Weighted Hardy-Poincare constant
//
//   int g^2 dmu <= beta~ int |grad g|^2 dnu_eps,   int g dmu = 0,
//
// computed sector by sector in spherical harmonics. Each sector reduces to a
// tridiagonal generalized eigenproblem K g = lambda M g on the radial grid,
// discretized exactly like the linearized entropy and Fisher information, so
// that E_lin <= (beta~/2) I_eps holds on the grid for every zero-mass v.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dnl/barenblatt.hpp"
#include "dnl/equilibrium.hpp"

namespace dnl {

class SpectralProblem {
 public:
  /// eps = 0 with p < 2 throws SingularWeightError unless exclude_origin is
  /// set, in which case cell 0 is dropped from the problem.
  static SpectralProblem assemble(const DiscreteEquilibrium& ref, double eps, int ell,
                                  bool exclude_origin = false);

  int ell() const { return ell_; }
  double eps() const { return eps_; }
  /// Index of the first grid cell carried by the problem (0 or 1).
  std::size_t offset() const { return offset_; }
  std::size_t size() const { return mass_.size(); }

  /// K_j couples unknowns j and j+1.
  std::span<const double> stiffness() const { return stiff_; }
  /// Angular term l(l+n-2) * weight, per unknown.
  std::span<const double> angular() const { return angular_; }
  /// omega_i / F''(u*_i), per unknown.
  std::span<const double> mass() const { return mass_; }

  double Q_nu(std::span<const double> g) const;
  double Q_mu(std::span<const double> g) const;
  /// int g dmu.
  double mu_mean(std::span<const double> g) const;

 private:
  int ell_ = 0;
  double eps_ = 0;
  std::size_t offset_ = 0;
  std::vector<double> stiff_, angular_, mass_;
};

struct EigenPair {
  double value = 0;
  std::vector<double> vector;  // in g variables, Q_mu-normalized
  int iterations = 0;
};

/// Smallest eigenvalue; for l = 0 with deflate, the smallest one on the
/// Q_mu-orthogonal complement of constants. Sturm bisection locates it and
/// shifted inverse iteration refines it to relative 1e-8.
EigenPair smallest_eigenpair(const SpectralProblem& problem, bool deflate = true);
double smallest_eigenvalue(const SpectralProblem& problem, bool deflate = true);

struct GapResult {
  double eps = 0;
  double beta_tilde = 0;
  /// 2(p-1)/beta~ for p < 2, 2/beta~ otherwise.
  double beta = 0;
  std::vector<double> sector_eigenvalues;  // l = 0 (deflated), 1, ..., ell_max
  int argmin_sector = 0;
  /// |beta~(refined) - beta~| / beta~(refined); NaN when not computed.
  double refinement_delta = 0;
};

GapResult hardy_poincare_constant(const DiscreteEquilibrium& ref, double eps, int ell_max,
                                  bool exclude_origin = false);

/// Same constant for `profile` sampled on `spec` and on spec.refined();
/// reports the finer result with its delta.
GapResult hardy_poincare_refined(const BarenblattProfile& profile, const GridSpec& spec, double eps,
                                 int ell_max, bool exclude_origin = false);

struct TestFunctionReport {
  int samples = 0;
  /// min over samples of (beta~ Q_nu - Q_mu) / Q_mu; negative means a violation.
  double worst_margin = 0;
  int worst_sector = 0;
};

/// Draws `samples` random test functions (random walks and bumps, random
/// sector up to the gap's ell_max, mu-mean removed in sector 0) and checks
/// Q_mu(g) <= beta~ Q_nu(g) for each. Deterministic in `seed`.
TestFunctionReport random_test_functions(const DiscreteEquilibrium& ref, const GapResult& gap, std::uint64_t seed,
                                         int samples = 50, bool exclude_origin = false);

}  // namespace dnl
