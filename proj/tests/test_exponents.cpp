#include <doctest.h>

#include <cmath>

#include "dnl/errors.hpp"
#include "dnl/exponents.hpp"

using namespace dnl;
using doctest::Approx;

TEST_CASE("canonical p < 2 exponents by hand") {
  const auto e = Exponents::derive(4.0 / 3.0, 1.5, 3);
  CHECK(e.q() == Approx(3.0).epsilon(1e-14));
  CHECK(e.gamma() == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(e.m_c() == Approx(1.0).epsilon(1e-14));
  CHECK(e.delta_p() == Approx(0.5).epsilon(1e-14));
  CHECK(e.alpha() == Approx(-11.0 / 4.0).epsilon(1e-14));
  CHECK(e.theta() == Approx(0.4).epsilon(1e-14));
  CHECK(e.p_c() == Approx(1.5).epsilon(1e-14));
  CHECK(validate_range(e) == RangeClass::in_range);
  CHECK(e.m_upper() == Approx(5.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("canonical p > 2 exponents by hand") {
  const auto e = Exponents::derive(0.1, 3.0, 3);
  CHECK(e.q() == Approx(1.5).epsilon(1e-14));
  CHECK(e.gamma() == Approx(0.6).epsilon(1e-14));
  CHECK(std::abs(e.m_c()) < 1e-15);
  CHECK(e.delta_p() == Approx(0.6).epsilon(1e-14));
  CHECK(validate_range(e) == RangeClass::in_range);
}

TEST_CASE("bad triples are rejected") {
  CHECK_THROWS_AS(Exponents::derive(1.0, 2.0, 3), LogarithmicCaseError);
  CHECK_THROWS_AS(Exponents::derive(1.0, 1.0, 3), ValidationError);
  CHECK_THROWS_AS(Exponents::derive(1.0, 1.5, 2), ValidationError);
  CHECK_THROWS_AS(Exponents::derive(0.0, 1.5, 3), ValidationError);
  CHECK_THROWS_AS(Exponents::derive(-1.0, 1.5, 3), ValidationError);
}

TEST_CASE("range classification") {
  CHECK(validate_range(Exponents::derive(2.0, 2.0, 3)) == RangeClass::displacement_convex);
  const auto at_mc = Exponents::derive(1.0, 1.5, 3);  // m_c = 1 for p = 3/2, n = 3
  CHECK(validate_range(at_mc) == RangeClass::mass_losing);
  CHECK(validate_range(Exponents::derive(0.9, 1.5, 3)) == RangeClass::mass_losing);
}

TEST_CASE("p = 2 reduces to the porous medium exponents") {
  for (int n : {3, 4, 6})
    for (double m : {0.5, 0.7, 0.8, 0.95}) {
      if (m <= 1.0 - 2.0 / n) continue;
      const auto e = Exponents::derive(m, 2.0, n);
      CHECK(e.q() == Approx(2.0));
      CHECK(e.gamma() == Approx(m));
      CHECK(e.m_c() == Approx(1.0 - 2.0 / n));
      CHECK(e.delta_p() == Approx(n * (m - 1.0) + 2.0));
    }
}

TEST_CASE("theta decreases in m and equals n/(n+q) at m_c") {
  for (double p : {1.4, 1.6, 2.5, 3.0})
    for (int n : {3, 5}) {
      const auto lo = Exponents::derive(1.0, p, n);
      const double mc = lo.m_c(), mu = lo.m_upper();
      double prev = 1e300;
      for (int k = 1; k < 40; ++k) {
        const double m = mc + (mu - mc) * k / 40.0;
        if (std::abs(m + (p - 2.0) / (p - 1.0) - 1.0) < 1e-9 || m <= 0.0) continue;
        const double th = Exponents::derive(m, p, n).theta();
        CHECK(th < prev);
        prev = th;
      }
      const double q = p / (p - 1.0);
      const double gamma_c = mc + (p - 2.0) / (p - 1.0);
      CHECK(formulas::theta(n, q, gamma_c) == Approx(n / (n + q)).epsilon(1e-12));
    }
}

TEST_CASE("independent formula routes agree on a lattice") {
  int checked = 0;
  for (int n = 3; n <= 7; ++n)
    for (int ip = 0; ip < 10; ++ip) {
      const double p = 1.1 + 0.35 * ip;
      const double mc = (n - p) / (n * (p - 1.0)), mu = (n - p + 1.0) / (n * (p - 1.0));
      for (int im = 1; im <= 20; ++im) {
        const double m = mc + (mu - mc) * im / 21.0;
        if (m <= 0.0) continue;
        const auto e = Exponents::derive(m, p, n);
        CHECK(formulas::delta_p_from_gap(m, p, n) ==
              Approx(formulas::delta_p_from_rescaling(m, p, n)).epsilon(1e-12));
        CHECK(formulas::alpha_from_mu_tail(e.q(), e.gamma()) ==
              Approx(formulas::alpha_from_nu_tail(e.q(), e.gamma())).epsilon(1e-12));
        CHECK(e.alpha() < -(n - 2.0) / 2.0);
        CHECK(e.delta_p() > 0.0);
        CHECK(e.gamma() < 1.0 - 1.0 / n);
        CHECK(e.theta() < 1.0);
        CHECK(1.0 / e.p() + 1.0 / e.q() == Approx(1.0).epsilon(1e-15));
        ++checked;
      }
    }
  CHECK(checked > 900);
}
