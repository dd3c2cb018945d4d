// Entropies, Fisher informations and the comparison constants between them.
//
// All integrals are midpoint sums over shells; all gradients are the
// centre-to-centre differences used by the solver flux, so the discrete
// dissipation identity dE/dtau = -I closes. Fields are compared against a
// DiscreteEquilibrium, which fixes the grid and u*.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dnl/barenblatt.hpp"
#include "dnl/equilibrium.hpp"

namespace dnl {

/// Nonlinear relative entropy E[u|u*].
double relative_entropy(std::span<const double> u, const DiscreteEquilibrium& ref);

/// Relative Fisher information I[u|u*] with the exact mobility grad c*.
double fisher_information(std::span<const double> u, const DiscreteEquilibrium& ref);

/// Dissipation of E along the regularized semi-discrete flow: same as
/// fisher_information with grad c* replaced by the solver mobility G.
double scheme_dissipation(std::span<const double> u, const DiscreteEquilibrium& ref, double eps_reg);

/// Linearized entropy 1/2 sum omega v^2 F''(u*). Rejects v whose discrete
/// mean is not zero to relative 1e-6.
double linear_entropy(std::span<const double> v, const DiscreteEquilibrium& ref);

struct LinearFisher {
  double I = 0;
  double I0 = 0;
  /// Shell volume left out at the origin (p < 2 only).
  double excluded_volume = 0;
};
LinearFisher linear_fisher(std::span<const double> v, const DiscreteEquilibrium& ref);

/// Linearized Fisher information with weight u*(eps + |grad c|)^{p-2}.
double eps_linear_fisher(std::span<const double> v, const DiscreteEquilibrium& ref, double eps);

/// sum u* (eps + |grad c|)^{p-2} |grad(F'(u) - F'(u*))|^2.
double gamma_eps_fisher(std::span<const double> u, const DiscreteEquilibrium& ref, double eps);

double l1_distance(std::span<const double> u, const DiscreteEquilibrium& ref);

/// ||u - u*||_1^2 / E; empty at equilibrium.
std::optional<double> ck_ratio(std::span<const double> u, const DiscreteEquilibrium& ref);

/// max over interior edges of Phi_eps = |grad F'(u)| / (eps + |grad F'(u*)|).
double phi_eps_max(std::span<const double> u, const DiscreteEquilibrium& ref, double eps);

/// max over r > 1 of r |dw/dr| / w.
double gradient_quotient_monitor(std::span<const double> u, const DiscreteEquilibrium& ref);

struct FunctionalSample {
  double E_rel = 0, I_rel = 0, E_lin = 0, I_lin = 0, I0_lin = 0, I_eps = 0, I_gamma_eps = 0;
  double eps = 0;
  double L1_dist = 0;
  double w_min = 1, w_max = 1;
  std::optional<double> ck_ratio;
  double phi_eps = 0;
  double grad_monitor = 0;
};

FunctionalSample sample_functionals(std::span<const double> u, const DiscreteEquilibrium& ref, double eps);

// ---------------------------------------------------------------------------
// Comparison constants

/// h_k(w) = (w^{k-1} - 1)/(k - 1).
double h_k(double w, double k);

struct ComparisonConstants {
  double W0 = 1, W1 = 1;
  double alpha0 = 1, alpha1 = 1, alpha2 = 1;
  double kappa0 = 1, kappa2 = 0;
  /// C_low E_lin <= E_rel <= C_high E_lin.
  double C_low = 1, C_high = 1;
  double delta = 0, eta = 0;
  double divbound = 0;
};

/// Fisher-comparison and entropy-comparison constants for quotients in [W0, W1];
/// delta and eta are left for claim2_delta.
ComparisonConstants claim1_constants(const Exponents& e, double W0, double W1);
ComparisonConstants claim1_constants(const Exponents& e, const SandwichBounds& b);

/// Constant delta in I_gamma^eps <= delta I. For p < 2 it depends on the
/// measured bound eta of Phi_eps; for p >= 2 it is 1/(delta_H W0) with
/// delta_H = 1/2 (p > 2) or 1 (p = 2).
double claim2_delta(const Exponents& e, double W0, double eta);

/// div(x |x|^{q-2} (eps + |x|^{q-1})^{p-2}) at |x| = r.
double div_weight(double r, double eps, const Exponents& e);

/// f_p(r, x) = (1 + r^p - (r + r^{p-1}) x) / (1 + r^2 - 2 r x).
double fp_ratio(double r, double x, double p);

struct HRatio {
  double direct = 0;  // H / |grad F'(u*)|^{p-2}
  double via_fp = 0;  // f_p(|b|, cos theta)
};
/// Both routes to the H quotient at interior edge j.
HRatio H_ratio(std::span<const double> u, const DiscreteEquilibrium& ref, std::size_t edge);

}  // namespace dnl
