#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "dnl/errors.hpp"
#include "dnl/functionals.hpp"
#include "dnl/spectral.hpp"

using namespace dnl;
using doctest::Approx;

namespace {

const Exponents A = Exponents::derive(4.0 / 3.0, 1.5, 3);
const Exponents B = Exponents::derive(0.1, 3.0, 3);

DiscreteEquilibrium reference(const Exponents& e, int cells) {
  const bool fast = e.p() < 2.0;
  const double stretch = std::pow(fast ? 1.0194785 : 1.0379295, 512.0 / cells);
  auto grid = std::make_shared<const RadialGrid>(RadialGrid::build(3, fast ? 2e4 : 1e8, cells, stretch));
  return DiscreteEquilibrium::mass_matched(e, grid, 1.0);
}

// Dense generalized eigenvalues of (K + angular, M), ascending.
Eigen::VectorXd dense_spectrum(const SpectralProblem& sp) {
  const auto n = static_cast<Eigen::Index>(sp.size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n), M = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    K(k, k) += sp.angular()[k];
    M(k, k) = sp.mass()[k];
  }
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double s = sp.stiffness()[k];
    K(k, k) += s;
    K(k + 1, k + 1) += s;
    K(k, k + 1) -= s;
    K(k + 1, k) -= s;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(K, M);
  REQUIRE(solver.info() == Eigen::Success);
  return solver.eigenvalues();
}

}  // namespace

TEST_CASE("sector eigenvalues agree with a dense generalized eigensolver") {
  for (const Exponents* e : {&A, &B}) {
    const auto ref = reference(*e, 96);
    const double eps = e->p() < 2.0 ? 0.1 : 0.0;
    for (int ell = 0; ell <= 2; ++ell) {
      const auto sp = SpectralProblem::assemble(ref, eps, ell);
      const Eigen::VectorXd dense = dense_spectrum(sp);
      const double mine = smallest_eigenvalue(sp, true);
      // l = 0: the constant is the zero mode; deflation returns the next one
      CHECK(mine == Approx(dense[ell == 0 ? 1 : 0]).epsilon(1e-7));
      if (ell == 0) {
        CHECK(std::abs(dense[0]) < 1e-8 * dense[1]);
        CHECK(smallest_eigenvalue(sp, false) < 1e-8 * mine);
      }
    }
  }
}

TEST_CASE("quadratic forms") {
  const auto ref = reference(A, 128);
  const auto s0 = SpectralProblem::assemble(ref, 0.1, 0);
  const auto s1 = SpectralProblem::assemble(ref, 0.1, 1);
  const std::vector<double> one(s0.size(), 1.0);
  CHECK(s0.Q_nu(one) == 0.0);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    std::vector<double> g(s0.size());
    for (double& x : g) x = N(rng);
    CHECK(s1.Q_nu(g) >= s0.Q_nu(g));
  }
  // mu weight per cell is omega / F''(u*); nu stiffness follows the far-field power law
  const auto w = ref.grid().volumes();
  for (std::size_t i = 0; i < s0.size(); i += 31) CHECK(s0.mass()[i] == Approx(w[i] / ref.fsecond()[i]));
  CHECK_THROWS_AS(SpectralProblem::assemble(ref, 0.0, 0), SingularWeightError);
  CHECK_NOTHROW(SpectralProblem::assemble(ref, 0.0, 0, true));
}

TEST_CASE("gap: sectors ordered, monotone in eps, above the origin-excluded constant") {
  const auto ref = reference(A, 256);
  const GapResult excluded = hardy_poincare_constant(ref, 0.0, 3, true);
  double prev = 0.0;
  for (double eps : {1e-3, 0.01, 0.1, 1.0}) {
    const GapResult g = hardy_poincare_constant(ref, eps, 4);
    CHECK(g.beta_tilde > 0.0);
    CHECK(g.beta_tilde >= prev * (1 - 1e-9));
    CHECK(g.beta_tilde >= excluded.beta_tilde * (1 - 1e-9));
    CHECK(g.beta == Approx(2.0 * (A.p() - 1.0) / g.beta_tilde));
    for (std::size_t l = 2; l < g.sector_eigenvalues.size(); ++l)
      CHECK(g.sector_eigenvalues[l] >= g.sector_eigenvalues[l - 1]);
    CHECK(g.argmin_sector <= 1);
    prev = g.beta_tilde;
  }
  const GapResult gb = hardy_poincare_constant(reference(B, 256), 0.0, 4);
  CHECK(gb.beta == Approx(2.0 / gb.beta_tilde));
}

TEST_CASE("the constant bounds every Rayleigh quotient") {
  for (const Exponents* e : {&A, &B}) {
    const auto ref = reference(*e, 256);
    const double eps = e->p() < 2.0 ? 0.1 : 0.0;
    const GapResult g = hardy_poincare_constant(ref, eps, 4);
    const auto rep = random_test_functions(ref, g, 17, 50);
    CHECK(rep.samples == 50);
    CHECK(rep.worst_margin >= -1e-10);
  }
}

TEST_CASE("discrete linearized log-Sobolev: E_lin <= (beta~/2) I_eps for zero-mean v") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> N(0.0, 1.0);
  for (const Exponents* e : {&A, &B}) {
    const auto ref = reference(*e, 256);
    const double eps = e->p() < 2.0 ? 0.1 : 0.0;
    const GapResult g = hardy_poincare_constant(ref, eps, 1);
    const auto w = ref.grid().volumes();
    for (int k = 0; k < 30; ++k) {
      std::vector<double> v(ref.cells());
      double acc = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = ref.u()[i] * (acc += 0.1 * N(rng));
      double mean = 0.0, vol = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        mean += w[i] * v[i];
        vol += w[i] * ref.u()[i];
      }
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= mean / vol * ref.u()[i];
      CHECK(linear_entropy(v, ref) <= 0.5 * g.beta_tilde * eps_linear_fisher(v, ref, eps) * (1 + 1e-10));
    }
  }
}

TEST_CASE("refinement stability of beta~ at eps = 0.1, p < 2") {
  const auto ref = reference(A, 512);
  const GapResult g = hardy_poincare_refined(ref.profile(), GridSpec{3, 2e4, 512, 1.0194785}, 0.1, 2);
  CHECK(std::isfinite(g.beta_tilde));
  CHECK(g.beta_tilde > 0.0);
  CHECK(g.refinement_delta < 0.02);
}
