#include "dnl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <memory>
#include <random>
#include <string>

#include "dnl/errors.hpp"

namespace dnl {

SpectralProblem SpectralProblem::assemble(const DiscreteEquilibrium& ref, double eps, int ell,
                                          bool exclude_origin) {
  const Exponents& e = ref.exponents();
  const double p = e.p(), q = e.q();
  if (ell < 0) throw ValidationError("sector index must be nonnegative");
  if (eps < 0.0) throw ValidationError("spectral.eps must be nonnegative");
  if (eps == 0.0 && p < 2.0 && !exclude_origin)
    throw SingularWeightError("the nu weight is singular at the origin for p < 2; use eps > 0");

  SpectralProblem sp;
  sp.ell_ = ell;
  sp.eps_ = eps;
  sp.offset_ = exclude_origin ? 1 : 0;
  const std::size_t N = ref.cells();
  if (N < sp.offset_ + 2) throw ValidationError("spectral problem needs at least two cells");
  const std::size_t M = N - sp.offset_;

  const auto w = ref.grid().volumes();
  const auto r = ref.grid().centers();
  const auto us = ref.u();
  const auto f2 = ref.fsecond();
  const auto A = ref.edge_area();
  const auto dr = ref.spacing();
  const auto ue = ref.edge_u();
  const auto ss = ref.edge_grad();
  const double ang = static_cast<double>(ell) * (ell + e.n() - 2);

  sp.mass_.resize(M);
  sp.angular_.resize(M);
  sp.stiff_.resize(M - 1);
  for (std::size_t k = 0; k < M; ++k) {
    const std::size_t i = k + sp.offset_;
    sp.mass_[k] = w[i] / f2[i];
    sp.angular_[k] =
        ang == 0.0 ? 0.0 : ang * w[i] * us[i] * std::pow(eps + std::pow(r[i], q - 1.0), p - 2.0) / (r[i] * r[i]);
  }
  for (std::size_t k = 0; k + 1 < M; ++k) {
    const std::size_t j = k + sp.offset_;
    sp.stiff_[k] = A[j] * ue[j] * std::pow(eps + std::abs(ss[j]), p - 2.0) / dr[j];
  }
  for (double x : sp.stiff_)
    if (!(x >= 0.0) || !std::isfinite(x)) throw NumericalError("indefinite stiffness assembly");
  for (double x : sp.mass_)
    if (!(x > 0.0) || !std::isfinite(x)) throw NumericalError("indefinite mass assembly");
  return sp;
}

double SpectralProblem::Q_nu(std::span<const double> g) const {
  if (g.size() != size()) throw ValidationError("test function has the wrong length");
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    const double d = g[k + 1] - g[k];
    total += stiff_[k] * d * d;
  }
  for (std::size_t k = 0; k < g.size(); ++k) total += angular_[k] * g[k] * g[k];
  return total;
}

double SpectralProblem::Q_mu(std::span<const double> g) const {
  if (g.size() != size()) throw ValidationError("test function has the wrong length");
  double total = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) total += mass_[k] * g[k] * g[k];
  return total;
}

double SpectralProblem::mu_mean(std::span<const double> g) const {
  if (g.size() != size()) throw ValidationError("test function has the wrong length");
  double total = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) total += mass_[k] * g[k];
  return total;
}

namespace {

// Symmetric tridiagonal T = M^{-1/2} (K + angular) M^{-1/2}.
struct Tridiagonal {
  std::vector<double> a, b;  // diagonal, off-diagonal
};

Tridiagonal symmetrize(const SpectralProblem& sp) {
  const auto K = sp.stiffness();
  const auto ang = sp.angular();
  const auto M = sp.mass();
  const std::size_t n = M.size();
  Tridiagonal t;
  t.a.resize(n);
  t.b.resize(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    double d = ang[k];
    if (k > 0) d += K[k - 1];
    if (k + 1 < n) d += K[k];
    t.a[k] = d / M[k];
  }
  for (std::size_t k = 0; k + 1 < n; ++k) t.b[k] = -K[k] / std::sqrt(M[k] * M[k + 1]);
  return t;
}

// Number of eigenvalues strictly below x (Sturm sequence of LDL^T pivots).
std::size_t count_below(const Tridiagonal& t, double x) {
  const double tiny = std::numeric_limits<double>::min();
  std::size_t count = 0;
  double d = t.a[0] - x;
  if (d < 0.0) ++count;
  for (std::size_t k = 1; k < t.a.size(); ++k) {
    if (d == 0.0) d = tiny;
    d = t.a[k] - x - t.b[k - 1] * t.b[k - 1] / d;
    if (d < 0.0) ++count;
  }
  return count;
}

// Solves (T - sigma) x = y in place (Thomas, with a pivot floor).
void shifted_solve(const Tridiagonal& t, double sigma, std::vector<double>& y) {
  const std::size_t n = t.a.size();
  std::vector<double> c(n), d(n);
  const double floor = 1e-300;
  double piv = t.a[0] - sigma;
  if (std::abs(piv) < floor) piv = floor;
  d[0] = y[0] / piv;
  for (std::size_t k = 1; k < n; ++k) {
    c[k - 1] = t.b[k - 1] / piv;
    piv = t.a[k] - sigma - t.b[k - 1] * c[k - 1];
    if (std::abs(piv) < floor) piv = floor;
    d[k] = (y[k] - t.b[k - 1] * d[k - 1]) / piv;
  }
  y[n - 1] = d[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) y[k] = d[k] - c[k] * y[k + 1];
}

double rayleigh(const Tridiagonal& t, const std::vector<double>& x) {
  const std::size_t n = x.size();
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double tx = t.a[k] * x[k];
    if (k > 0) tx += t.b[k - 1] * x[k - 1];
    if (k + 1 < n) tx += t.b[k] * x[k + 1];
    num += x[k] * tx;
    den += x[k] * x[k];
  }
  return num / den;
}

}  // namespace

EigenPair smallest_eigenpair(const SpectralProblem& sp, bool deflate) {
  const Tridiagonal t = symmetrize(sp);
  const std::size_t n = t.a.size();
  const bool project = deflate && sp.ell() == 0;
  const std::size_t target = project ? 1 : 0;

  double hi = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double row = std::abs(t.a[k]);
    if (k > 0) row += std::abs(t.b[k - 1]);
    if (k + 1 < n) row += std::abs(t.b[k]);
    hi = std::max(hi, row);
  }
  double lo = 0.0;
  // Bracket eigenvalue number `target`: count_below(lo) <= target < count_below(hi).
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(t, mid) > target) hi = mid; else lo = mid;
  }
  const double lambda = 0.5 * (lo + hi);

  // Null vector of the l = 0 pencil in symmetrized variables: M^{1/2} 1.
  std::vector<double> z;
  double zz = 0.0;
  if (project) {
    z.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      z[k] = std::sqrt(sp.mass()[k]);
      zz += z[k] * z[k];
    }
  }
  auto deflate_and_normalize = [&](std::vector<double>& x) {
    if (project) {
      double dot = 0.0;
      for (std::size_t k = 0; k < n; ++k) dot += x[k] * z[k];
      for (std::size_t k = 0; k < n; ++k) x[k] -= dot / zz * z[k];
    }
    double nrm = 0.0;
    for (double v : x) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("inverse iteration broke down");
    for (double& v : x) v /= nrm;
  };

  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = 1.0 + 0.5 * std::sin(1.0 + 3.7 * k);
  deflate_and_normalize(x);
  const double sigma = lambda * (1.0 - 1e-10);

  EigenPair out;
  double prev = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int it = 1; it <= 100; ++it) {
    shifted_solve(t, sigma, x);
    deflate_and_normalize(x);
    const double rho = rayleigh(t, x);
    out.iterations = it;
    if (std::abs(rho - prev) <= 1e-8 * std::abs(rho)) {
      prev = rho;
      converged = true;
      break;
    }
    prev = rho;
  }
  if (!converged) throw NumericalError("shifted inverse iteration did not converge");
  out.value = prev;

  // Back to g = M^{-1/2} x, normalized so that Q_mu(g) = 1.
  out.vector.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.vector[k] = x[k] / std::sqrt(sp.mass()[k]);
  return out;
}

double smallest_eigenvalue(const SpectralProblem& sp, bool deflate) {
  return smallest_eigenpair(sp, deflate).value;
}

GapResult hardy_poincare_constant(const DiscreteEquilibrium& ref, double eps, int ell_max, bool exclude_origin) {
  if (ell_max < 1) throw ValidationError("spectral.ell_max must be at least 1");
  GapResult g;
  g.eps = eps;
  g.sector_eigenvalues.resize(ell_max + 1);
  // Sectors are independent.
  std::vector<std::future<double>> jobs;
  for (int ell = 0; ell <= ell_max; ++ell)
    jobs.push_back(std::async(std::launch::async, [&ref, eps, ell, exclude_origin] {
      return smallest_eigenvalue(SpectralProblem::assemble(ref, eps, ell, exclude_origin), true);
    }));
  double best = std::numeric_limits<double>::infinity();
  for (int ell = 0; ell <= ell_max; ++ell) {
    const double lam = jobs[ell].get();
    if (!(lam > 0.0)) throw NumericalError("sector " + std::to_string(ell) + " has a nonpositive eigenvalue");
    g.sector_eigenvalues[ell] = lam;
    if (lam < best) {
      best = lam;
      g.argmin_sector = ell;
    }
  }
  g.beta_tilde = 1.0 / best;
  const double p = ref.exponents().p();
  g.beta = p < 2.0 ? 2.0 * (p - 1.0) / g.beta_tilde : 2.0 / g.beta_tilde;
  g.refinement_delta = std::nan("");
  return g;
}

GapResult hardy_poincare_refined(const BarenblattProfile& profile, const GridSpec& spec, double eps, int ell_max,
                                 bool exclude_origin) {
  GridSpec s = spec;
  s.n = profile.exponents().n();
  auto coarse_grid = std::make_shared<const RadialGrid>(RadialGrid::build(s));
  auto fine_grid = std::make_shared<const RadialGrid>(RadialGrid::build(s.refined()));
  const GapResult coarse =
      hardy_poincare_constant(DiscreteEquilibrium(coarse_grid, profile), eps, ell_max, exclude_origin);
  GapResult fine = hardy_poincare_constant(DiscreteEquilibrium(fine_grid, profile), eps, ell_max, exclude_origin);
  fine.refinement_delta = std::abs(fine.beta_tilde - coarse.beta_tilde) / fine.beta_tilde;
  return fine;
}

TestFunctionReport random_test_functions(const DiscreteEquilibrium& ref, const GapResult& gap, std::uint64_t seed,
                                         int samples, bool exclude_origin) {
  const int ell_max = static_cast<int>(gap.sector_eigenvalues.size()) - 1;
  if (ell_max < 0) throw ValidationError("gap has no sector data");
  std::vector<SpectralProblem> problems;
  for (int ell = 0; ell <= ell_max; ++ell) problems.push_back(SpectralProblem::assemble(ref, gap.eps, ell, exclude_origin));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> pick_sector(0, ell_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  TestFunctionReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const auto r = ref.grid().centers();
  for (int k = 0; k < samples; ++k) {
    const int ell = pick_sector(rng);
    const SpectralProblem& sp = problems[ell];
    const std::size_t n = sp.size();
    std::vector<double> g(n);
    if (k % 2 == 0) {
      // rough: random walk
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) g[i] = acc += normal(rng);
    } else {
      // smooth: a few bumps in log r
      const int bumps = 1 + static_cast<int>(3 * unit(rng));
      for (int b = 0; b < bumps; ++b) {
        const double centre = std::log(r[sp.offset()]) + unit(rng) * (std::log(r.back()) - std::log(r[sp.offset()]));
        const double width = 0.2 + 2.0 * unit(rng);
        const double amp = normal(rng);
        for (std::size_t i = 0; i < n; ++i) {
          const double z = (std::log(r[i + sp.offset()]) - centre) / width;
          g[i] += amp * std::exp(-0.5 * z * z);
        }
      }
    }
    if (ell == 0) {
      double total = 0.0;
      for (double m : sp.mass()) total += m;
      const double mean = sp.mu_mean(g) / total;
      for (double& x : g) x -= mean;
    }
    const double qm = sp.Q_mu(g);
    if (!(qm > 0.0)) continue;
    const double margin = (gap.beta_tilde * sp.Q_nu(g) - qm) / qm;
    ++rep.samples;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_sector = ell;
    }
  }
  return rep;
}

}  // namespace dnl
