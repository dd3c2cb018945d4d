#include <doctest.h>

#include <cmath>
#include <random>

#include "dnl/errors.hpp"
#include "dnl/functionals.hpp"
#include "dnl/solver.hpp"

using namespace dnl;
using doctest::Approx;

namespace {

const Exponents A = Exponents::derive(4.0 / 3.0, 1.5, 3);
const Exponents B = Exponents::derive(0.1, 3.0, 3);

struct Setup {
  GridPtr grid;
  DiscreteEquilibrium ref;
};

Setup setup(const Exponents& e, int cells = 256) {
  const double r_max = e.p() < 2.0 ? 2e4 : 1e8;
  auto grid = std::make_shared<const RadialGrid>(RadialGrid::build(3, r_max, cells, e.p() < 2.0 ? 1.04 : 1.075));
  return Setup{grid, DiscreteEquilibrium::mass_matched(e, grid, 1.0)};
}

// u* (1 + a xi) with xi smooth, random and of zero u*-weighted mean.
std::vector<double> perturbed(const DiscreteEquilibrium& ref, double a, std::mt19937_64& rng, bool flat_core = false) {
  std::normal_distribution<double> N(0.0, 1.0);
  const auto r = ref.grid().centers();
  const auto w = ref.grid().volumes();
  const auto us = ref.u();
  const double c1 = N(rng), c2 = N(rng), c3 = N(rng), l = std::exp(N(rng));
  std::vector<double> xi(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double z = std::log1p(r[i] / l);
    xi[i] = c1 * std::sin(z) + c2 * std::cos(2 * z) + c3 * std::exp(-z);
    if (flat_core && i < 4) xi[i] = 0.0;
  }
  if (flat_core) {
    // remove the mean using cells away from the core only
    double num = 0.0, den = 0.0;
    for (std::size_t i = 4; i < r.size(); ++i) {
      num += w[i] * us[i] * xi[i];
      den += w[i] * us[i] * std::exp(-r[i]);
    }
    for (std::size_t i = 4; i < r.size(); ++i) xi[i] -= num / den * std::exp(-r[i]);
    // cells 4.. no longer flat against cell 3, but edges 0..2 are
  } else {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      num += w[i] * us[i] * xi[i];
      den += w[i] * us[i];
    }
    for (double& x : xi) x -= num / den;
  }
  double mx = 0.0;
  for (double x : xi) mx = std::max(mx, std::abs(x));
  std::vector<double> u(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) u[i] = us[i] * (1.0 + a * xi[i] / mx);
  return u;
}

std::vector<double> diff(const std::vector<double>& u, const DiscreteEquilibrium& ref) {
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] - ref.u()[i];
  return v;
}

}  // namespace

TEST_CASE("functionals vanish at equilibrium") {
  for (const Exponents* e : {&A, &B}) {
    const auto s = setup(*e);
    const std::vector<double> u(s.ref.u().begin(), s.ref.u().end());
    const std::vector<double> v(u.size(), 0.0);
    CHECK(relative_entropy(u, s.ref) == 0.0);
    CHECK(fisher_information(u, s.ref) == 0.0);
    CHECK(linear_entropy(v, s.ref) == 0.0);
    CHECK(linear_fisher(v, s.ref).I == 0.0);
    CHECK(linear_fisher(v, s.ref).I0 == 0.0);
    CHECK(gamma_eps_fisher(u, s.ref, 0.1) == 0.0);
    CHECK(l1_distance(u, s.ref) == 0.0);
    CHECK_FALSE(ck_ratio(u, s.ref).has_value());
  }
}

TEST_CASE("relative entropy of other profiles: positive, shrinking as D -> D*") {
  const auto s = setup(A);
  const double Ds = s.ref.profile().D();
  double prev = 1e300;
  for (double f : {2.0, 1.5, 1.2, 1.05}) {
    const BarenblattProfile b(A, Ds * f);
    std::vector<double> u;
    for (double r : s.grid->centers()) u.push_back(b(r));
    const double E = relative_entropy(u, s.ref);
    CHECK(E > 0.0);
    CHECK(E < prev);
    prev = E;
    const auto ck = ck_ratio(u, s.ref);
    REQUIRE(ck.has_value());
    CHECK(std::isfinite(*ck));
    CHECK(*ck > 0.0);
  }
}

TEST_CASE("fisher information is positive off equilibrium") {
  std::mt19937_64 rng(11);
  for (const Exponents* e : {&A, &B}) {
    const auto s = setup(*e);
    for (int k = 0; k < 10; ++k) CHECK(fisher_information(perturbed(s.ref, 0.3, rng), s.ref) > 0.0);
  }
}

TEST_CASE("linearized Fisher: Cauchy-Schwarz and the p < 2 lower bound") {
  std::mt19937_64 rng(5);
  for (const Exponents* e : {&A, &B}) {
    const auto s = setup(*e);
    const double p = e->p();
    for (int k = 0; k < 20; ++k) {
      const auto v = diff(perturbed(s.ref, 0.2, rng), s.ref);
      const auto lf = linear_fisher(v, s.ref);
      CHECK(lf.I0 <= lf.I * (1 + 1e-12));
      CHECK(lf.I + (p - 2.0) * lf.I0 >= std::min(1.0, p - 1.0) * lf.I * (1 - 1e-12));
    }
  }
}

TEST_CASE("eps = 0 Fisher equals the plain one for p >= 2; weight domination for p < 2") {
  std::mt19937_64 rng(9);
  const auto sb = setup(B);
  for (int k = 0; k < 5; ++k) {
    const auto v = diff(perturbed(sb.ref, 0.2, rng), sb.ref);
    CHECK(eps_linear_fisher(v, sb.ref, 0.0) == Approx(linear_fisher(v, sb.ref).I).epsilon(1e-12));
  }
  const auto sa = setup(A);
  CHECK_THROWS_AS(eps_linear_fisher(std::vector<double>(sa.ref.cells(), 0.0), sa.ref, 0.0), ValidationError);
  for (int k = 0; k < 5; ++k) {
    // flat near the origin so the excluded edge carries nothing
    const auto v = diff(perturbed(sa.ref, 0.2, rng, true), sa.ref);
    const double I = linear_fisher(v, sa.ref).I;
    double prev = 1e300;
    for (double eps : {1e-3, 1e-2, 0.1, 1.0}) {
      const double Ie = eps_linear_fisher(v, sa.ref, eps);
      CHECK(Ie <= I * (1 + 1e-12));
      CHECK(Ie <= prev);
      prev = Ie;
    }
  }
}

TEST_CASE("small perturbations: E_rel/eps^2 -> E_lin, I_rel/eps^2 -> I + (p-2) I0") {
  std::mt19937_64 rng(21);
  for (const Exponents* e : {&A, &B}) {
    const auto s = setup(*e);
    for (int k = 0; k < 3; ++k) {
      const auto u = perturbed(s.ref, 1e-3, rng);
      const auto v = diff(u, s.ref);
      const auto lf = linear_fisher(v, s.ref);
      CHECK(relative_entropy(u, s.ref) / linear_entropy(v, s.ref) == Approx(1.0).epsilon(0.01));
      if (e->p() >= 2.0)
        CHECK(fisher_information(u, s.ref) / (lf.I + (e->p() - 2.0) * lf.I0) == Approx(1.0).epsilon(0.05));
    }
  }
}

TEST_CASE("h_k and the Fisher comparison constants") {
  CHECK(h_k(1.0, 2.0) == 0.0);
  CHECK(h_k(1.0, 1.0 / 3.0) == 0.0);
  const auto one = claim1_constants(A, 1.0, 1.0);
  CHECK(one.alpha0 == Approx(1.0));
  CHECK(one.alpha1 == Approx(1.0));
  CHECK(one.alpha2 == Approx(1.0));
  CHECK(one.kappa0 == Approx(1.0));
  CHECK(one.kappa2 == Approx(0.0));
  for (const Exponents* e : {&A, &B})
    for (auto [W0, W1] : {std::pair{0.5, 2.0}, std::pair{0.9, 1.05}, std::pair{0.2, 1.0}}) {
      const auto c = claim1_constants(*e, W0, W1);
      const double g = e->gamma();
      CHECK(c.alpha0 <= 1.0);
      CHECK(c.alpha1 >= 1.0);
      CHECK(c.alpha2 >= 1.0);
      CHECK(c.kappa0 == Approx(std::max(c.alpha1, c.alpha2)));
      CHECK(c.C_low <= c.C_high);
      // brute-force sweep of h_2^2 / h_g^2 over [W0, W1]
      for (int i = 0; i <= 2000; ++i) {
        const double w = W0 + (W1 - W0) * i / 2000.0;
        if (std::abs(w - 1.0) < 1e-9) continue;
        const double h2 = h_k(w, 2.0), hg = h_k(w, g);
        CHECK(c.alpha0 * hg * hg <= h2 * h2 * (1 + 1e-12));
        CHECK(h2 * h2 <= c.alpha1 * hg * hg * (1 + 1e-12));
      }
    }
}

TEST_CASE("entropy comparison on random sandwiched fields") {
  std::mt19937_64 rng(4);
  for (const Exponents* e : {&A, &B}) {
    const auto s = setup(*e);
    for (double a : {0.5, 0.1, 0.01}) {
      const auto u = perturbed(s.ref, a, rng);
      double W0 = 1.0, W1 = 1.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        W0 = std::min(W0, u[i] / s.ref.u()[i]);
        W1 = std::max(W1, u[i] / s.ref.u()[i]);
      }
      const auto c = claim1_constants(*e, W0, W1);
      const double El = linear_entropy(diff(u, s.ref), s.ref), Er = relative_entropy(u, s.ref);
      CHECK(c.C_low * El <= Er * (1 + 1e-12));
      CHECK(Er <= c.C_high * El * (1 + 1e-12));
    }
  }
}

TEST_CASE("divergence of the weight") {
  for (auto [m, p] : {std::pair{3.2, 1.25}, std::pair{4.0 / 3.0, 1.5}, std::pair{0.8, 1.75}}) {
    const auto e = Exponents::derive(m, p, 3);
    const double bound = 3 + 2 * (e.q() - 2);
    for (int i = 0; i < 100; ++i)
      for (int j = 0; j < 100; ++j) {
        const double r = std::pow(10.0, -4.0 + 8.0 * i / 99.0);
        const double eps = std::pow(10.0, -6.0 + 8.0 * j / 99.0);
        CHECK(std::abs(div_weight(r, eps, e)) <= bound * (1 + 1e-12));
      }
    CHECK(std::abs(div_weight(1.0, 1e40, e)) < 1e-6);
    // eps = 0: r-independent
    const double c0 = div_weight(1.0, 0.0, e);
    for (double r : {1e-3, 0.5, 7.0, 1e3}) CHECK(div_weight(r, 0.0, e) == Approx(c0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(div_weight(0.0, 0.1, A), ValidationError);
}

TEST_CASE("f_p and the H quotient") {
  for (double r : {0.0, 0.3, 2.0, 9.0})
    for (double x : {-1.0, -0.2, 0.5, 0.99}) CHECK(fp_ratio(r, x, 2.0) == Approx(1.0).epsilon(1e-14));
  CHECK(fp_ratio(2.0, 1.0, 3.0) == Approx(3.0));
  CHECK(fp_ratio(1.0 + 1e-4, 1.0, 3.0) == Approx(2.0).epsilon(1e-3));
  CHECK(fp_ratio(1.0 + 1e-4, 1.0, 4.0) == Approx(3.0).epsilon(1e-3));
  CHECK_THROWS_AS(fp_ratio(1.0, 1.0, 3.0), ValidationError);
  for (double p : {2.5, 3.0, 4.0})
    for (int i = 0; i < 100; ++i)
      for (int j = 0; j < 100; ++j) {
        const double r = std::pow(10.0, -3.0 + 6.0 * i / 99.0);
        const double x = -1.0 + 2.0 * j / 99.0;
        if (std::abs(r - 1.0) < 1e-12 && x == 1.0) continue;
        CHECK(fp_ratio(r, x, p) >= 0.5);
        if (x == 1.0 && r != 1.0) CHECK(fp_ratio(r, 1.0, p) >= 1.0);
      }

  std::mt19937_64 rng(8);
  const auto s = setup(B);
  const auto u = perturbed(s.ref, 0.3, rng);
  for (std::size_t j = 5; j < s.ref.interior_edges(); j += 23) {
    const auto h = H_ratio(u, s.ref, j);
    CHECK(h.direct == Approx(h.via_fp).epsilon(1e-10));
  }
}

TEST_CASE("zero mean is required") {
  const auto s = setup(A, 64);
  std::vector<double> v(s.ref.cells(), 1e-3);
  CHECK_THROWS_AS(linear_entropy(v, s.ref), ValidationError);
}
