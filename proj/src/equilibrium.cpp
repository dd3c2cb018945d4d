#include "dnl/equilibrium.hpp"

#include <cmath>

#include "dnl/errors.hpp"

namespace dnl {

double pow1p_minus_one(double delta, double a) {
  return std::expm1(a * std::log1p(delta));
}

double bregman_kernel(double delta, double gamma) {
  if (std::abs(delta) < 1e-4) {
    // sum_{k>=2} (g-2)(g-3)...(g-k+1)/k! delta^k
    double coeff = 0.5;
    double term = delta * delta;
    double sum = coeff * term;
    for (int k = 3; k <= 7; ++k) {
      coeff *= (gamma - (k - 1)) / k;
      term *= delta;
      sum += coeff * term;
    }
    return sum;
  }
  const double L = std::log1p(delta);
  const double scaled = gamma == 0.0 ? L : std::expm1(gamma * L) / gamma;
  return (scaled - delta) / (gamma - 1.0);
}

double grid_profile_mass(const Exponents& e, const RadialGrid& grid, double D) {
  const auto r = grid.centers();
  const auto w = grid.volumes();
  const double k = e.profile_slope(), pw = e.profile_power(), q = e.q();
  double total = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) total += w[i] * std::pow(D + k * std::pow(r[i], q), pw);
  return total;
}

DiscreteEquilibrium::DiscreteEquilibrium(GridPtr grid, const BarenblattProfile& profile)
    : grid_(std::move(grid)), profile_(profile) {
  const Exponents& e = profile_.exponents();
  const auto r = grid_->centers();
  const auto areas = grid_->areas();
  const std::size_t N = r.size();
  const double g = e.gamma(), m = e.m(), q = e.q();

  u_.resize(N);
  fprime_.resize(N);
  fsecond_.resize(N);
  mu_gamma_.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double u = profile_(r[i]);
    u_[i] = u;
    fprime_[i] = m * std::pow(u, g - 1.0) / (g - 1.0);
    fsecond_[i] = m * std::pow(u, g - 2.0);
    mu_gamma_[i] = m * std::pow(u, g);
  }

  const std::size_t E = N > 0 ? N - 1 : 0;
  dr_.resize(E);
  area_.resize(E);
  u_edge_.resize(E);
  grad_.resize(E);
  for (std::size_t j = 0; j < E; ++j) {
    dr_[j] = r[j + 1] - r[j];
    area_[j] = areas[j + 1];
    u_edge_[j] = 0.5 * (u_[j] + u_[j + 1]);
    grad_[j] = -(std::pow(r[j + 1], q) - std::pow(r[j], q)) / (q * dr_[j]);
  }
}

DiscreteEquilibrium DiscreteEquilibrium::mass_matched(const Exponents& e, GridPtr grid, double mass) {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ValidationError("target mass must be positive");
  // Discrete mass is strictly decreasing in D; Newton on log D from the
  // continuum scaling-law guess, safeguarded by a bracket.
  const double k = e.mass_scaling_exponent();
  double logD = std::log(solve_Dstar(e, mass).D());
  double lo = -700.0, hi = 700.0;
  for (int it = 0; it < 100; ++it) {
    const double D = std::exp(logD);
    const double M = grid_profile_mass(e, *grid, D);
    const double f = std::log(M / mass);
    if (std::abs(f) < 1e-15) break;
    if (f > 0.0) lo = logD; else hi = logD;
    // d log M / d log D, exact for the discrete sum
    const auto r = grid->centers();
    const auto w = grid->volumes();
    double dM = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double base = D + e.profile_slope() * std::pow(r[i], e.q());
      dM += w[i] * e.profile_power() * std::pow(base, e.profile_power() - 1.0) * D;
    }
    double slope = dM / M;
    if (!(slope < 0.0)) slope = k;
    double next = logD - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    logD = next;
  }
  return DiscreteEquilibrium(std::move(grid), BarenblattProfile(e, std::exp(logD)));
}

DensityField DiscreteEquilibrium::field() const {
  return DensityField{grid_, profile_.exponents(), u_};
}

double DiscreteEquilibrium::mass() const {
  const auto w = grid_->volumes();
  double total = 0.0;
  for (std::size_t i = 0; i < u_.size(); ++i) total += w[i] * u_[i];
  return total;
}

}  // namespace dnl
