#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dnl/errors.hpp"
#include "dnl/functionals.hpp"
#include "dnl/solver.hpp"

using namespace dnl;
using doctest::Approx;

namespace {

const Exponents A = Exponents::derive(4.0 / 3.0, 1.5, 3);
const Exponents B = Exponents::derive(0.1, 3.0, 3);

GridPtr make_grid(int n, double r_max, int cells, double stretch) {
  return std::make_shared<const RadialGrid>(RadialGrid::build(n, r_max, cells, stretch));
}

double sup_w_minus_one(const std::vector<double>& u, const DiscreteEquilibrium& ref) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s = std::max(s, std::abs(u[i] / ref.u()[i] - 1.0));
  return s;
}

}  // namespace

TEST_CASE("grid geometry") {
  const auto one = RadialGrid::build(3, 1.0, 1, 1.0);
  CHECK(one.volumes()[0] == Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-14));
  for (int n : {3, 4, 5}) {
    const auto g = RadialGrid::build(n, 7.0, 200, 1.02);
    double total = 0.0;
    for (double w : g.volumes()) total += w;
    CHECK(total == Approx(unit_sphere_area(n) * std::pow(7.0, n) / n).epsilon(1e-12));
    const auto e = g.edges();
    for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] > e[i - 1]);
  }
  const auto u = RadialGrid::build(3, 2.0, 40, 1.0);
  for (std::size_t i = 1; i < u.edges().size(); ++i) CHECK(u.edges()[i] - u.edges()[i - 1] == Approx(0.05));
  CHECK_THROWS_AS(RadialGrid::build(3, -1.0, 16, 1.0), ValidationError);
  CHECK_THROWS_AS(RadialGrid::build(3, 1.0, 16, 0.9), ValidationError);
}

TEST_CASE("initial data obeys the sandwich") {
  auto grid = make_grid(3, 2e4, 256, 1.04);
  const BarenblattProfile u0(A, 2.0), u1(A, 0.5);
  for (InitShape shape : {InitShape::step, InitShape::step_inverted}) {
    InitSpec spec;
    spec.shape = shape;
    const InitialData d = build_initial_data(A, grid, spec);
    const auto r = grid->centers();
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(d.field.u[i] >= u0(r[i]) * (1 - 1e-12));
      CHECK(d.field.u[i] <= u1(r[i]) * (1 + 1e-12));
    }
    const double m0 = grid_profile_mass(A, *grid, 2.0), m1 = grid_profile_mass(A, *grid, 0.5);
    CHECK(d.mass > m0);
    CHECK(d.mass < m1);
  }
  InitSpec eq;
  eq.shape = InitShape::equilibrium;
  eq.D0 = 1.3;
  const InitialData d = build_initial_data(A, grid, eq);
  CHECK(d.D0 == d.D1);
  // scaling the mass up pushes the data above u_{D1} somewhere
  InitSpec heavy;
  heavy.mass = 1e3;
  CHECK_THROWS_AS(build_initial_data(A, grid, heavy), SandwichViolation);
}

TEST_CASE("mobility") {
  CHECK(mobility(0.0, 1.5, 0.1) == 0.0);
  CHECK(mobility(-2.0, 1.5, 0.1) == Approx(-mobility(2.0, 1.5, 0.1)));
  // eps = 0 is grad c*
  CHECK(mobility(-2.0, 3.0, 0.0) == Approx(-4.0));
  for (double s : {0.3, 1.0, 4.0}) {
    const double h = 1e-6;
    CHECK((mobility(s + h, 1.5, 0.05) - mobility(s - h, 1.5, 0.05)) / (2 * h) ==
          Approx(mobility_derivative(s, 1.5, 0.05)).epsilon(1e-7));
  }
}

TEST_CASE("mass is conserved to round-off over 10^4 steps") {
  auto grid = make_grid(3, 1e6, 64, 1.2);
  InitSpec spec;
  const InitialData d = build_initial_data(B, grid, spec);
  const auto ref = DiscreteEquilibrium::mass_matched(B, grid, d.mass);
  Solver solver(ref);
  TimeState st{0.0, d.field, 0, 0.0, 0.0};
  const double m0 = st.field.mass();
  double worst = 0.0;
  while (st.step_count < 10000) {
    solver.step(st);
    worst = std::max(worst, std::abs(st.field.mass() - m0) / m0);
  }
  CHECK(worst < 1e-12);
  CHECK(st.clipped_mass == 0.0);
}

TEST_CASE("flux telescopes: total change equals zero boundary flux") {
  auto grid = make_grid(3, 2e4, 64, 1.1);
  const InitialData d = build_initial_data(A, grid, InitSpec{});
  const auto ref = DiscreteEquilibrium::mass_matched(A, grid, d.mass);
  Solver solver(ref);
  double sum = 0.0, scale = 0.0;
  const auto area = grid->areas();
  const std::size_t N = grid->cells();
  for (std::size_t i = 0; i < N; ++i) {
    const double out = i + 1 < N ? area[i + 1] * solver.flux(d.field, i) : 0.0;
    const double in = i > 0 ? area[i] * solver.flux(d.field, i - 1) : 0.0;
    sum += out - in;
    scale += std::abs(out) + std::abs(in);
  }
  CHECK(std::abs(sum) < 1e-13 * scale);
}

TEST_CASE("equilibrium: exact steady state with the balanced drift, O(h) with the edge drift") {
  auto run = [](int cells, DriftForm form) {
    auto grid = make_grid(3, 2e4, cells, std::pow(1.04, 256.0 / cells));
    const auto ref = DiscreteEquilibrium::mass_matched(A, grid, 1.0);
    SolverOptions opt;
    opt.drift = form;
    Solver solver(ref, opt);
    TimeState st{0.0, ref.field(), 0, 0.0, 0.0};
    for (int k = 0; k < 1000; ++k) solver.step(st);
    for (std::size_t j = 0; j < ref.interior_edges(); j += 17)
      if (form == DriftForm::balanced) CHECK(std::abs(solver.flux(ref.field(), j)) < 1e-12);
    return sup_w_minus_one(st.field.u, ref);
  };
  CHECK(run(256, DriftForm::balanced) < 1e-11);
  const double coarse = run(128, DriftForm::edge), fine = run(256, DriftForm::edge);
  CHECK(fine < coarse);
  CHECK(std::log2(coarse / fine) > 0.8);
}

TEST_CASE("entropy decreases along a run and two starts of equal mass meet") {
  SimulationConfig c;
  c.m = 0.1;
  c.p = 3.0;
  c.grid = GridSpec{3, 1e8, 128, 1.16};
  c.tau_end = 8.0;
  c.cadence = 0.2;
  c.init.D0 = 8.0;
  c.init.D1 = 0.125;
  const SimulationResult a = simulate(c);
  const auto E = a.series.column("E_rel");
  for (std::size_t i = 1; i < E.size(); ++i) CHECK(E[i] <= E[i - 1] * (1 + 1e-9));
  const auto w0 = a.series.column("w_min"), w1 = a.series.column("w_max");
  for (std::size_t i = 0; i < w0.size(); ++i) {
    CHECK(w0[i] >= a.bounds.W0 - 1e-9);
    CHECK(w1[i] <= a.bounds.W1 + 1e-9);
  }


  // second start with the same mass: u* times a zero-mass smooth wiggle
  const DiscreteEquilibrium& ref = *a.reference;
  const auto r = ref.grid().centers();
  const auto w = ref.grid().volumes();
  std::vector<double> xi(r.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    xi[i] = std::sin(std::log1p(r[i]));
    num += w[i] * ref.u()[i] * xi[i];
    den += w[i] * ref.u()[i];
  }
  std::vector<double> ub(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) ub[i] = ref.u()[i] * (1.0 + 0.3 * (xi[i] - num / den));
  Solver solver(ref);
  TimeState st{0.0, DensityField{ref.grid_ptr(), ref.exponents(), ub}, 0, 0.0, 0.0};
  CHECK(st.field.mass() == Approx(a.series.rows().front().mass).epsilon(1e-12));
  while (st.tau < c.tau_end) solver.step(st, c.tau_end - st.tau);

  const auto& ua = a.snapshots.back().u;
  const InitialData ia = build_initial_data(ref.exponents(), ref.grid_ptr(), c.init);
  double dist = 0.0, dist0 = 0.0;
  for (std::size_t i = 0; i < ua.size(); ++i) {
    dist += w[i] * std::abs(ua[i] - st.field.u[i]);
    dist0 += w[i] * std::abs(ia.field.u[i] - ub[i]);
  }
  CHECK(dist < 1e-2 * dist0);
}

TEST_CASE("original variables") {
  auto grid = make_grid(3, 100.0, 64, 1.03);
  const auto ref = DiscreteEquilibrium::mass_matched(A, grid, 1.0);
  const auto u = ref.u();
  const auto ov0 = to_original_variables(A, *grid, 0.0, u);
  CHECK(ov0.t == 0.0);
  CHECK(ov0.R == 1.0);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(ov0.rho[i] == u[i]);

  for (double tau : {0.5, 3.0, 12.0}) {
    const auto ov = to_original_variables(A, *grid, tau, u);
    CHECK(tau_from_t(A, ov.t) == Approx(tau).epsilon(1e-12));
    CHECK(ov.R == Approx(std::pow(1.0 + A.delta_p() * ov.t, 1.0 / A.delta_p())).epsilon(1e-12));
    const auto back = to_rescaled_density(A, ov);
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      CHECK(back[i] == Approx(u[i]).epsilon(1e-12));
      m += ov.rho[i] * ov.volumes[i];
    }
    CHECK(m == Approx(ref.mass()).epsilon(1e-12));
  }
  // u_{D*} in original variables approaches the self-similar Barenblatt
  // (delta t)^{-n/delta} u_{D*}(x (delta t)^{-1/delta}) for large t.
  const BarenblattProfile& b = ref.profile();
  const double d = A.delta_p();
  for (std::size_t i : {0u, 10u, 40u}) {
    const auto ov = to_original_variables(A, *grid, 40.0, u);
    const double scale = d * ov.t;
    const double far = std::pow(scale, -3.0 / d) * b(ov.x[i] * std::pow(scale, -1.0 / d));
    CHECK(ov.rho[i] / far == Approx(u[i] / b(grid->centers()[i])).epsilon(1e-6));
  }
}
