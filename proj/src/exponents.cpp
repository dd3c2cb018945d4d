#include "dnl/exponents.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dnl/errors.hpp"

namespace dnl {

namespace formulas {

double delta_p_from_gap(double m, double p, int n) {
  const double m_c = (n - p) / (n * (p - 1.0));
  return n * (p - 1.0) * (m - m_c);
}

double delta_p_from_rescaling(double m, double p, int n) {
  return (p - 1.0) * (n * m + 1.0) + 1.0 - n;
}

double alpha_from_mu_tail(double q, double gamma) {
  return 1.0 + q * (2.0 - gamma) / (2.0 * (gamma - 1.0));
}

double alpha_from_nu_tail(double q, double gamma) {
  return (2.0 - q) / 2.0 + q / (2.0 * (gamma - 1.0));
}

double theta(int n, double q, double gamma) {
  return n * (1.0 - gamma) / (q * (2.0 - gamma));
}

}  // namespace formulas

namespace {

bool agree(double a, double b, double rel) {
  const double scale = std::max({std::abs(a), std::abs(b), 1.0});
  return std::abs(a - b) <= rel * scale;
}

}  // namespace

std::string_view to_string(RangeClass c) {
  switch (c) {
    case RangeClass::in_range:
      return "in-range";
    case RangeClass::displacement_convex:
      return "displacement-convex";
    case RangeClass::mass_losing:
      return "mass-losing";
  }
  return "unknown";
}

Exponents Exponents::derive(double m, double p, int n) {
  if (!(p > 1.0)) throw ValidationError("p must exceed 1, got " + std::to_string(p));
  if (n < 3) throw ValidationError("n must be at least 3, got " + std::to_string(n));
  if (!(m > 0.0)) throw ValidationError("m must be positive, got " + std::to_string(m));

  Exponents e;
  e.m_ = m;
  e.p_ = p;
  e.n_ = n;
  e.q_ = p / (p - 1.0);
  e.gamma_ = m + (p - 2.0) / (p - 1.0);
  if (std::abs(e.gamma_ - 1.0) < 1e-12) {
    throw LogarithmicCaseError("gamma = m + (p-2)/(p-1) equals 1 (logarithmic case m = 1/(p-1))");
  }
  e.m_c_ = (n - p) / (n * (p - 1.0));
  e.p_c_ = 2.0 * n / (n + 1.0);
  e.m_upper_ = (n - p + 1.0) / (n * (p - 1.0));

  e.delta_p_ = formulas::delta_p_from_gap(m, p, n);
  const double delta_alt = formulas::delta_p_from_rescaling(m, p, n);
  if (!agree(e.delta_p_, delta_alt, 1e-12)) {
    throw NumericalError("delta_p routes disagree");
  }
  e.alpha_ = formulas::alpha_from_mu_tail(e.q_, e.gamma_);
  if (!agree(e.alpha_, formulas::alpha_from_nu_tail(e.q_, e.gamma_), 1e-12)) {
    throw NumericalError("alpha routes disagree");
  }
  e.theta_ = formulas::theta(n, e.q_, e.gamma_);

  const double nq = n - e.q_;
  e.m_star_ = nq == 0.0 ? -std::numeric_limits<double>::infinity()
                        : (n - 2.0 * e.q_) / nq + (2.0 - p) / (p - 1.0);
  return e;
}

RangeClass validate_range(const Exponents& e) {
  if (e.m() <= e.m_c()) return RangeClass::mass_losing;
  if (e.m() >= e.m_upper()) return RangeClass::displacement_convex;
  return RangeClass::in_range;
}

}  // namespace dnl
