// Exponent algebra for rho_t = div(|grad rho^m|^{p-2} grad rho^m) in R^n.
//
// Everything downstream is parameterized by the triple (m, p, n); this header
// derives the conjugate exponent, the entropy exponent gamma, the critical
// thresholds and the self-similar scaling rate once, and freezes them.

#pragma once

#include <string_view>

namespace dnl {

enum class RangeClass {
  in_range,             // m_c < m < (n-p+1)/(n(p-1))
  displacement_convex,  // m >= (n-p+1)/(n(p-1))
  mass_losing,          // m <= m_c
};

std::string_view to_string(RangeClass c);

class Exponents {
 public:
  /// Throws ValidationError for p <= 1, n < 3, m <= 0 and
  /// LogarithmicCaseError when gamma == 1.
  static Exponents derive(double m, double p, int n);

  double m() const { return m_; }
  double p() const { return p_; }
  int n() const { return n_; }
  double q() const { return q_; }
  double gamma() const { return gamma_; }
  double m_c() const { return m_c_; }
  double p_c() const { return p_c_; }
  double m_upper() const { return m_upper_; }
  double delta_p() const { return delta_p_; }
  double alpha() const { return alpha_; }
  double theta() const { return theta_; }
  /// Lower linearization exponent; informational only, infinite when q == n.
  double m_star() const { return m_star_; }

  /// Profile coefficient (1 - gamma)/(m q) multiplying r^q.
  double profile_slope() const { return (1.0 - gamma_) / (m_ * q_); }
  /// 1/(gamma - 1): the power of the Barenblatt profile.
  double profile_power() const { return 1.0 / (gamma_ - 1.0); }
  /// Exponent of D in the mass scaling law M(D) = D^{k} M(1).
  double mass_scaling_exponent() const { return profile_power() + n_ / q_; }

 private:
  Exponents() = default;

  double m_ = 0, p_ = 0;
  int n_ = 0;
  double q_ = 0, gamma_ = 0, m_c_ = 0, p_c_ = 0, m_upper_ = 0;
  double delta_p_ = 0, alpha_ = 0, theta_ = 0, m_star_ = 0;
};

RangeClass validate_range(const Exponents& e);

// Independent routes to the same constants, kept public for identity checks.
namespace formulas {
double delta_p_from_gap(double m, double p, int n);        // n(p-1)(m - m_c)
double delta_p_from_rescaling(double m, double p, int n);  // (p-1)(nm+1)+1-n
double alpha_from_mu_tail(double q, double gamma);         // 1 + q(2-g)/(2(g-1))
double alpha_from_nu_tail(double q, double gamma);         // (2-q)/2 + q/(2(g-1))
double theta(int n, double q, double gamma);
}  // namespace formulas

}  // namespace dnl
