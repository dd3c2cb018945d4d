// The Barenblatt equilibrium sampled on a radial grid, plus the edge data
// (spacings, areas, averaged densities, discrete gradients of F'(u*)) that
// the solver fluxes and every gradient functional share.
//
// Interior edge j sits at r_{j+1/2} between cells j and j+1, j = 0..N-2.

#pragma once

#include <span>
#include <vector>

#include "dnl/barenblatt.hpp"
#include "dnl/grid.hpp"

namespace dnl {

class DiscreteEquilibrium {
 public:
  DiscreteEquilibrium(GridPtr grid, const BarenblattProfile& profile);

  /// Profile whose midpoint-rule mass on `grid` equals `mass`, so that
  /// v = u - u* has exactly zero discrete mean.
  static DiscreteEquilibrium mass_matched(const Exponents& e, GridPtr grid, double mass);

  const BarenblattProfile& profile() const { return profile_; }
  const Exponents& exponents() const { return profile_.exponents(); }
  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t cells() const { return u_.size(); }
  std::size_t interior_edges() const { return dr_.size(); }

  std::span<const double> u() const { return u_; }
  std::span<const double> fprime() const { return fprime_; }
  std::span<const double> fsecond() const { return fsecond_; }
  /// F(u*_i) in the scaled form m u*^gamma (the 1/(g(g-1)) sits in the kernel).
  std::span<const double> mu_gamma() const { return mu_gamma_; }

  std::span<const double> spacing() const { return dr_; }
  std::span<const double> edge_area() const { return area_; }
  std::span<const double> edge_u() const { return u_edge_; }
  /// s*_j = -(c(r_{j+1}) - c(r_j))/dr_j, the discrete d/dr F'(u*).
  std::span<const double> edge_grad() const { return grad_; }

  DensityField field() const;
  double mass() const;

 private:
  GridPtr grid_;
  BarenblattProfile profile_;
  std::vector<double> u_, fprime_, fsecond_, mu_gamma_;
  std::vector<double> dr_, area_, u_edge_, grad_;
};

/// Discrete mass sum_i omega_i u_D(r_i).
double grid_profile_mass(const Exponents& e, const RadialGrid& grid, double D);

// Cancellation-free pointwise kernels in terms of delta = u/u* - 1.

/// (1 + delta)^a - 1.
double pow1p_minus_one(double delta, double a);

/// ((1+delta)^g - 1 - g delta) / (g (g-1)); the Bregman integrand of F
/// divided by m u*^g. Smooth in g through g = 0.
double bregman_kernel(double delta, double gamma);

}  // namespace dnl
