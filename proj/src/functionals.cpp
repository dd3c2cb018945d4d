#include "dnl/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "dnl/errors.hpp"
#include "dnl/solver.hpp"

namespace dnl {

namespace {

void check_size(std::span<const double> u, const DiscreteEquilibrium& ref) {
  if (u.size() != ref.cells())
    throw ValidationError("field has " + std::to_string(u.size()) + " cells, reference has " +
                          std::to_string(ref.cells()));
}

// psi_i = F'(u_i) - F'(u*_i), computed through the quotient so that tiny
// perturbations do not cancel.
std::vector<double> fprime_shift(std::span<const double> u, const DiscreteEquilibrium& ref) {
  check_size(u, ref);
  const double g = ref.exponents().gamma();
  const auto us = ref.u();
  const auto fp = ref.fprime();
  std::vector<double> psi(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0))
      throw ValidationError("Fisher information needs a positive field; cell " + std::to_string(i) +
                            " holds " + std::to_string(u[i]));
    psi[i] = fp[i] * pow1p_minus_one(u[i] / us[i] - 1.0, g - 1.0);
  }
  return psi;
}

// g_i = v_i F''(u*_i), the linearized counterpart of psi.
std::vector<double> linear_shift(std::span<const double> v, const DiscreteEquilibrium& ref) {
  check_size(v, ref);
  const auto f2 = ref.fsecond();
  std::vector<double> g(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) g[i] = v[i] * f2[i];
  return g;
}

void require_zero_mean(std::span<const double> v, const DiscreteEquilibrium& ref) {
  const auto w = ref.grid().volumes();
  double mean = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    mean += w[i] * v[i];
    scale += w[i] * std::abs(v[i]);
  }
  // Round-off relative to the total mass is tolerated too (v ~ 0 at equilibrium).
  if (std::abs(mean) > 1e-6 * scale + 1e-12 * ref.mass()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", mean);
    throw ValidationError(std::string("perturbation does not have zero mass (sum = ") + buf + ")");
  }
}

}  // namespace

double relative_entropy(std::span<const double> u, const DiscreteEquilibrium& ref) {
  check_size(u, ref);
  const double g = ref.exponents().gamma();
  const auto w = ref.grid().volumes();
  const auto us = ref.u();
  const auto mg = ref.mu_gamma();
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < 0.0) throw ValidationError("negative density in cell " + std::to_string(i));
    total += w[i] * mg[i] * bregman_kernel(u[i] / us[i] - 1.0, g);
  }
  return total;
}

double fisher_information(std::span<const double> u, const DiscreteEquilibrium& ref) {
  const auto psi = fprime_shift(u, ref);
  const double p = ref.exponents().p();
  const auto dr = ref.spacing();
  const auto A = ref.edge_area();
  const auto ss = ref.edge_grad();
  double total = 0.0;
  for (std::size_t j = 0; j < dr.size(); ++j) {
    const double d = (psi[j + 1] - psi[j]) / dr[j];
    const double s = ss[j] + d;
    const double ue = 0.5 * (u[j] + u[j + 1]);
    total += A[j] * dr[j] * ue * d * (grad_cost_conjugate_1d(s, p) - grad_cost_conjugate_1d(ss[j], p));
  }
  return total;
}

double scheme_dissipation(std::span<const double> u, const DiscreteEquilibrium& ref, double eps_reg) {
  const auto psi = fprime_shift(u, ref);
  const double p = ref.exponents().p();
  const auto dr = ref.spacing();
  const auto A = ref.edge_area();
  const auto ss = ref.edge_grad();
  double total = 0.0;
  for (std::size_t j = 0; j < dr.size(); ++j) {
    const double d = (psi[j + 1] - psi[j]) / dr[j];
    const double ue = 0.5 * (u[j] + u[j + 1]);
    total += A[j] * dr[j] * ue * d * (mobility(ss[j] + d, p, eps_reg) - mobility(ss[j], p, eps_reg));
  }
  return total;
}

double linear_entropy(std::span<const double> v, const DiscreteEquilibrium& ref) {
  check_size(v, ref);
  require_zero_mean(v, ref);
  const auto w = ref.grid().volumes();
  const auto f2 = ref.fsecond();
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) total += w[i] * v[i] * v[i] * f2[i];
  return 0.5 * total;
}

LinearFisher linear_fisher(std::span<const double> v, const DiscreteEquilibrium& ref) {
  require_zero_mean(v, ref);
  const auto g = linear_shift(v, ref);
  const double p = ref.exponents().p();
  const auto dr = ref.spacing();
  const auto A = ref.edge_area();
  const auto ss = ref.edge_grad();
  const auto ue = ref.edge_u();

  LinearFisher out;
  std::size_t first = 0;
  if (p < 2.0 && !dr.empty()) {
    first = 1;
    out.excluded_volume = ref.grid().volumes()[0];
  }
  for (std::size_t j = first; j < dr.size(); ++j) {
    const double W = (g[j + 1] - g[j]) / dr[j];
    const double a = std::abs(ss[j]);
    const double vol = A[j] * dr[j] * ue[j];
    out.I += vol * std::pow(a, p - 2.0) * W * W;
    // (A.W)^2 |A|^{p-4}; in one radial dimension A.W = |A||W|.
    const double aw = ss[j] * W;
    out.I0 += vol * std::pow(a, p - 4.0) * aw * aw;
  }
  return out;
}

double eps_linear_fisher(std::span<const double> v, const DiscreteEquilibrium& ref, double eps) {
  const double p = ref.exponents().p();
  if (p < 2.0 && !(eps > 0.0)) throw ValidationError("reg.eps must be positive when p < 2");
  if (eps < 0.0) throw ValidationError("reg.eps must be nonnegative");
  require_zero_mean(v, ref);
  const auto g = linear_shift(v, ref);
  const auto dr = ref.spacing();
  const auto A = ref.edge_area();
  const auto ss = ref.edge_grad();
  const auto ue = ref.edge_u();
  double total = 0.0;
  for (std::size_t j = 0; j < dr.size(); ++j) {
    const double W = (g[j + 1] - g[j]) / dr[j];
    total += A[j] * dr[j] * ue[j] * std::pow(eps + std::abs(ss[j]), p - 2.0) * W * W;
  }
  return total;
}

double gamma_eps_fisher(std::span<const double> u, const DiscreteEquilibrium& ref, double eps) {
  const double p = ref.exponents().p();
  if (p < 2.0 && !(eps > 0.0)) throw ValidationError("reg.eps must be positive when p < 2");
  if (eps < 0.0) throw ValidationError("reg.eps must be nonnegative");
  const auto psi = fprime_shift(u, ref);
  const auto dr = ref.spacing();
  const auto A = ref.edge_area();
  const auto ss = ref.edge_grad();
  const auto ue = ref.edge_u();
  double total = 0.0;
  for (std::size_t j = 0; j < dr.size(); ++j) {
    const double d = (psi[j + 1] - psi[j]) / dr[j];
    total += A[j] * dr[j] * ue[j] * std::pow(eps + std::abs(ss[j]), p - 2.0) * d * d;
  }
  return total;
}

double l1_distance(std::span<const double> u, const DiscreteEquilibrium& ref) {
  check_size(u, ref);
  const auto w = ref.grid().volumes();
  const auto us = ref.u();
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) total += w[i] * std::abs(u[i] - us[i]);
  return total;
}

std::optional<double> ck_ratio(std::span<const double> u, const DiscreteEquilibrium& ref) {
  const double E = relative_entropy(u, ref);
  if (!(E > 0.0)) return std::nullopt;
  const double L = l1_distance(u, ref);
  return L * L / E;
}

double phi_eps_max(std::span<const double> u, const DiscreteEquilibrium& ref, double eps) {
  const auto psi = fprime_shift(u, ref);
  const auto dr = ref.spacing();
  const auto ss = ref.edge_grad();
  double best = 0.0;
  for (std::size_t j = 0; j < dr.size(); ++j) {
    const double s = ss[j] + (psi[j + 1] - psi[j]) / dr[j];
    best = std::max(best, std::abs(s) / (eps + std::abs(ss[j])));
  }
  return best;
}

double gradient_quotient_monitor(std::span<const double> u, const DiscreteEquilibrium& ref) {
  check_size(u, ref);
  const auto r = ref.grid().centers();
  const auto us = ref.u();
  double best = 0.0;
  for (std::size_t j = 0; j + 1 < u.size(); ++j) {
    const double rm = 0.5 * (r[j] + r[j + 1]);
    if (rm <= 1.0) continue;
    const double w0 = u[j] / us[j], w1 = u[j + 1] / us[j + 1];
    const double wm = 0.5 * (w0 + w1);
    if (!(wm > 0.0)) continue;
    best = std::max(best, rm * std::abs(w1 - w0) / ((r[j + 1] - r[j]) * wm));
  }
  return best;
}

FunctionalSample sample_functionals(std::span<const double> u, const DiscreteEquilibrium& ref, double eps) {
  check_size(u, ref);
  FunctionalSample s;
  s.eps = eps;
  s.E_rel = relative_entropy(u, ref);
  s.L1_dist = l1_distance(u, ref);
  s.ck_ratio = s.E_rel > 0.0 ? std::optional<double>(s.L1_dist * s.L1_dist / s.E_rel) : std::nullopt;

  const auto us = ref.u();
  std::vector<double> v(u.size());
  s.w_min = s.w_max = u.empty() ? 1.0 : u[0] / us[0];
  bool positive = true;
  for (std::size_t i = 0; i < u.size(); ++i) {
    v[i] = u[i] - us[i];
    const double w = u[i] / us[i];
    s.w_min = std::min(s.w_min, w);
    s.w_max = std::max(s.w_max, w);
    positive = positive && u[i] > 0.0;
  }
  s.grad_monitor = gradient_quotient_monitor(u, ref);

  // Linearized quantities use v directly; zero mean holds because the
  // reference is mass-matched on this grid.
  const auto w = ref.grid().volumes();
  double mean = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    mean += w[i] * v[i];
    scale += w[i] * std::abs(v[i]);
  }
  if (std::abs(mean) <= 1e-6 * scale) {
    s.E_lin = linear_entropy(v, ref);
    const LinearFisher lf = linear_fisher(v, ref);
    s.I_lin = lf.I;
    s.I0_lin = lf.I0;
    s.I_eps = eps_linear_fisher(v, ref, eps);
  } else {
    s.E_lin = s.I_lin = s.I0_lin = s.I_eps = std::nan("");
  }

  if (positive) {
    s.I_rel = fisher_information(u, ref);
    s.I_gamma_eps = gamma_eps_fisher(u, ref, eps);
    s.phi_eps = phi_eps_max(u, ref, eps);
  } else {
    s.I_rel = s.I_gamma_eps = s.phi_eps = std::nan("");
  }
  return s;
}

// ---------------------------------------------------------------------------

double h_k(double w, double k) {
  if (k == 1.0) throw ValidationError("h_k is undefined for k = 1");
  if (!(w > 0.0)) throw ValidationError("h_k needs w > 0");
  return std::expm1((k - 1.0) * std::log(w)) / (k - 1.0);
}

namespace {

// |g-1|^2 ((W-1)/(W^{g-1}-1))^2, continuous at W = 1 where it equals 1.
double endpoint_alpha(double W, double g) {
  const double x = std::log(W);
  if (std::abs(x) < 1e-8) return 1.0 + (2.0 - g) * x;
  const double ratio = (g - 1.0) * std::expm1(x) / std::expm1((g - 1.0) * x);
  return ratio * ratio;
}

}  // namespace

ComparisonConstants claim1_constants(const Exponents& e, double W0, double W1) {
  if (!(W0 > 0.0 && W0 <= 1.0 && W1 >= 1.0 && std::isfinite(W1)))
    throw ValidationError("quotient bounds must satisfy 0 < W0 <= 1 <= W1");
  const double g = e.gamma();
  ComparisonConstants c;
  c.W0 = W0;
  c.W1 = W1;
  c.alpha0 = endpoint_alpha(W0, g);
  c.alpha1 = endpoint_alpha(W1, g);
  c.alpha2 = std::pow(W1, 2.0 * (2.0 - g));
  c.kappa0 = std::max(c.alpha1, c.alpha2);
  // n + 2(q-2) bounds the divergence only for q >= 2 (p <= 2); at p > 2 the
  // unregularized divergence is exactly n.
  c.divbound = std::max<double>(e.n(), e.n() + 2.0 * (e.q() - 2.0));
  c.kappa2 = 2.0 * (c.kappa0 / c.alpha0 - 1.0) * (1.0 - g) * c.divbound;
  c.C_low = std::pow(W1, g - 2.0);
  c.C_high = std::pow(W0, g - 2.0);
  return c;
}

ComparisonConstants claim1_constants(const Exponents& e, const SandwichBounds& b) {
  return claim1_constants(e, b.W0, b.W1);
}

double claim2_delta(const Exponents& e, double W0, double eta) {
  if (!(W0 > 0.0)) throw ValidationError("W0 must be positive");
  const double p = e.p();
  if (p > 2.0) return 2.0 / W0;
  if (p == 2.0) return 1.0 / W0;
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ValidationError("eta must be finite and nonnegative");
  const double n = e.n(), q = e.q(), g = e.gamma();
  const double divbound = n + 2.0 * (q - 2.0);
  return std::max({p * std::pow(eta, 2.0 - p), q, 2.0 * g * divbound / n}) / W0;
}

double div_weight(double r, double eps, const Exponents& e) {
  if (!(r > 0.0)) throw ValidationError("div_weight needs r > 0");
  if (eps < 0.0) throw ValidationError("div_weight needs eps >= 0");
  const double n = e.n(), p = e.p(), q = e.q();
  const double rho = std::pow(r, q - 1.0);
  const double a = eps + rho;
  return std::pow(r, q - 2.0) * std::pow(a, p - 3.0) * ((n + q - 2.0) * a + (p - 2.0) * (q - 1.0) * rho);
}

double fp_ratio(double r, double x, double p) {
  if (r < 0.0) throw ValidationError("fp_ratio needs r >= 0");
  if (x < -1.0 || x > 1.0) throw ValidationError("fp_ratio needs x in [-1, 1]");
  const double den = 1.0 + r * r - 2.0 * r * x;
  if (!(den > 0.0)) throw ValidationError("fp_ratio is undefined at (r, x) = (1, 1)");
  return (1.0 + std::pow(r, p) - (r + std::pow(r, p - 1.0)) * x) / den;
}

HRatio H_ratio(std::span<const double> u, const DiscreteEquilibrium& ref, std::size_t edge) {
  if (edge >= ref.interior_edges()) throw ValidationError("edge index out of range");
  const double p = ref.exponents().p();
  const auto psi = fprime_shift(u, ref);
  const double ss = ref.edge_grad()[edge];
  const double d = (psi[edge + 1] - psi[edge]) / ref.spacing()[edge];
  if (d == 0.0) throw ValidationError("H is undefined where grad(F'(u) - F'(u*)) vanishes");
  if (ss == 0.0) throw ValidationError("H quotient needs grad F'(u*) != 0");
  const double s = ss + d;
  HRatio h;
  h.direct = d * (grad_cost_conjugate_1d(s, p) - grad_cost_conjugate_1d(ss, p)) / (d * d) /
             std::pow(std::abs(ss), p - 2.0);
  const double b = s / std::abs(ss);
  const double x = b == 0.0 ? 0.0 : ((b > 0.0) == (ss > 0.0) ? 1.0 : -1.0);
  h.via_fp = fp_ratio(std::abs(b), x, p);
  return h;
}

}  // namespace dnl
