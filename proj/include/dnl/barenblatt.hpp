// Barenblatt equilibria of the rescaled equation and the scalar ingredients
// they are built from: the nonlinearity F, the cost c(z) = |z|^q/q and its
// Legendre dual c*(z) = |z|^p/p.
//
// In the fast-diffusion regime (gamma < 1) every profile
//
//   u_D(r) = (D + (1-gamma)/(m q) r^q)^{1/(gamma-1)}
//
// is strictly positive with a power-law tail, and solves
// d/dr F'(u_D) = -r^{q-1} for every D > 0.

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "dnl/exponents.hpp"

namespace dnl {

/// F(x) = m x^g / (g (g-1)) and its first two derivatives (order 0, 1, 2).
double nonlinearity(const Exponents& e, double x, int order);

double cost(const Exponents& e, std::span<const double> z);
double cost_conjugate(const Exponents& e, std::span<const double> z);
std::vector<double> grad_cost(const Exponents& e, std::span<const double> z);
std::vector<double> grad_cost_conjugate(const Exponents& e, std::span<const double> z);

/// Radial component of grad c*: s |s|^{p-2}, continuous at s = 0.
inline double grad_cost_conjugate_1d(double s, double p);

class BarenblattProfile {
 public:
  /// Throws DivergentMassError when m <= m_c.
  BarenblattProfile(const Exponents& e, double D);

  const Exponents& exponents() const { return e_; }
  double D() const { return D_; }
  double mass() const { return mass_; }

  double operator()(double r) const;
  /// Density of dmu = dx / F''(u_D).
  double mu_density(double r) const;
  /// Density of dnu_eps = u_D (eps + r^{q-1})^{p-2} dx; eps = 0 gives nu.
  double nu_density(double r, double eps) const;

 private:
  Exponents e_;
  double D_;
  double mass_;
};

/// Total mass of u_D over R^n: adaptive quadrature up to the radius where the
/// D-term is 1e-8 of the c-term, plus the analytic power-law tail.
double profile_mass(const Exponents& e, double D);

/// Mass-matched profile: closed form from the scaling law, then one polish
/// step against the quadrature.
BarenblattProfile solve_Dstar(const Exponents& e, double target_mass = 1.0);

struct SandwichBounds {
  double D0 = 1, D1 = 1, Dstar = 1;
  double W0 = 1, W1 = 1;
};

/// Quotient bounds W0 = (D*/D0)^{1/(1-g)} <= 1 <= (D*/D1)^{1/(1-g)} = W1.
SandwichBounds sandwich_bounds(const Exponents& e, double D0, double D1, double Dstar);

// ---------------------------------------------------------------------------

inline double grad_cost_conjugate_1d(double s, double p) {
  if (s == 0.0) return 0.0;
  return s * std::pow(std::abs(s), p - 2.0);
}

}  // namespace dnl
