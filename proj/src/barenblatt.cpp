#include "dnl/barenblatt.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "dnl/errors.hpp"
#include "dnl/grid.hpp"

namespace dnl {

namespace {

double norm(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s += v * v;
  return std::sqrt(s);
}

// Ratio of the D-term to the c-term at the quadrature cut-off.
constexpr double kCutoffRatio = 1e-8;

}  // namespace

double nonlinearity(const Exponents& e, double x, int order) {
  if (!(x > 0.0)) throw ValidationError("F is only evaluated at positive arguments");
  const double g = e.gamma();
  double value = 0.0;
  switch (order) {
    case 0:
      value = e.m() * std::pow(x, g) / (g * (g - 1.0));
      break;
    case 1:
      value = e.m() * std::pow(x, g - 1.0) / (g - 1.0);
      break;
    case 2:
      value = e.m() * std::pow(x, g - 2.0);
      break;
    default:
      throw ValidationError("F derivative order must be 0, 1 or 2");
  }
  if (!std::isfinite(value)) {
    throw NumericalError("F^(" + std::to_string(order) + ") overflows at x = " + std::to_string(x));
  }
  return value;
}

double cost(const Exponents& e, std::span<const double> z) {
  return std::pow(norm(z), e.q()) / e.q();
}

double cost_conjugate(const Exponents& e, std::span<const double> z) {
  return std::pow(norm(z), e.p()) / e.p();
}

std::vector<double> grad_cost(const Exponents& e, std::span<const double> z) {
  const double r = norm(z);
  std::vector<double> g(z.begin(), z.end());
  if (r == 0.0) return std::vector<double>(z.size(), 0.0);
  const double scale = std::pow(r, e.q() - 2.0);
  for (double& v : g) v *= scale;
  return g;
}

std::vector<double> grad_cost_conjugate(const Exponents& e, std::span<const double> z) {
  const double r = norm(z);
  if (r == 0.0) return std::vector<double>(z.size(), 0.0);
  std::vector<double> g(z.begin(), z.end());
  const double scale = std::pow(r, e.p() - 2.0);
  for (double& v : g) v *= scale;
  return g;
}

double profile_mass(const Exponents& e, double D) {
  if (!(D > 0.0)) throw ValidationError("profile parameter D must be positive");
  if (e.mass_scaling_exponent() >= 0.0) {
    throw DivergentMassError("Barenblatt mass diverges for m <= m_c (m = " + std::to_string(e.m()) +
                             ", m_c = " + std::to_string(e.m_c()) + ")");
  }
  const int n = e.n();
  const double q = e.q();
  const double k = e.profile_slope();
  const double pw = e.profile_power();
  const double sphere = unit_sphere_area(n);

  auto integrand = [&](double r) {
    return std::pow(r, n - 1) * std::pow(D + k * std::pow(r, q), pw);
  };

  // The integrand changes character at the core radius where D ~ k r^q; split
  // geometrically from there so each panel is smooth on its own scale.
  const double core = std::pow(D / k, 1.0 / q);
  const double r_cut = core * std::pow(1.0 / kCutoffRatio, 1.0 / q);
  using boost::math::quadrature::gauss_kronrod;
  double total = gauss_kronrod<double, 31>::integrate(integrand, 0.0, core, 12, 1e-15);
  for (double a = core; a < r_cut; a *= 2.0) {
    const double b = std::min(2.0 * a, r_cut);
    total += gauss_kronrod<double, 31>::integrate(integrand, a, b, 12, 1e-15);
  }

  // Tail: (k r^q)^{pw} (1 + x)^{pw} with x = D/(k r^q) <= 1e-8, expanded to
  // second order and integrated term by term.
  double tail = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= 2; ++j) {
    const double power = n + q * (pw - j);
    tail += binom * std::pow(D, j) * std::pow(k, pw - j) * std::pow(r_cut, power) / (-power);
    binom *= (pw - j) / (j + 1.0);
  }
  const double mass = sphere * (total + tail);
  if (!std::isfinite(mass) || mass <= 0.0) throw NumericalError("non-finite Barenblatt mass");
  return mass;
}

BarenblattProfile::BarenblattProfile(const Exponents& e, double D)
    : e_(e), D_(D), mass_(profile_mass(e, D)) {}

double BarenblattProfile::operator()(double r) const {
  return std::pow(D_ + e_.profile_slope() * std::pow(r, e_.q()), e_.profile_power());
}

double BarenblattProfile::mu_density(double r) const {
  const double g = e_.gamma();
  return std::pow(D_ + e_.profile_slope() * std::pow(r, e_.q()), (2.0 - g) / (g - 1.0)) / e_.m();
}

double BarenblattProfile::nu_density(double r, double eps) const {
  const double p = e_.p();
  if (eps < 0.0) throw ValidationError("nu regularization eps must be nonnegative");
  if (eps == 0.0 && p < 2.0 && r == 0.0) {
    throw SingularWeightError("nu density is singular at r = 0 for p < 2; use eps > 0");
  }
  return (*this)(r) * std::pow(eps + std::pow(r, e_.q() - 1.0), p - 2.0);
}

BarenblattProfile solve_Dstar(const Exponents& e, double target_mass) {
  if (!(target_mass > 0.0) || !std::isfinite(target_mass)) {
    throw ValidationError("target mass must be positive and finite");
  }
  const double m1 = profile_mass(e, 1.0);
  if (!std::isfinite(m1)) throw NumericalError("non-finite reference mass M(1)");
  const double k = e.mass_scaling_exponent();
  double D = std::pow(target_mass / m1, 1.0 / k);
  // Newton on log M(D) = k log D + const, which is exact up to quadrature error.
  D *= std::pow(target_mass / profile_mass(e, D), 1.0 / k);
  return BarenblattProfile(e, D);
}

SandwichBounds sandwich_bounds(const Exponents& e, double D0, double D1, double Dstar) {
  if (!(D1 > 0.0) || !(Dstar >= D1) || !(D0 >= Dstar)) {
    throw ValidationError("sandwich requires D0 >= D* >= D1 > 0 (got D0=" + std::to_string(D0) +
                          ", D*=" + std::to_string(Dstar) + ", D1=" + std::to_string(D1) + ")");
  }
  const double power = 1.0 / (1.0 - e.gamma());
  SandwichBounds b;
  b.D0 = D0;
  b.D1 = D1;
  b.Dstar = Dstar;
  b.W0 = std::pow(Dstar / D0, power);
  b.W1 = std::pow(Dstar / D1, power);
  return b;
}

}  // namespace dnl
