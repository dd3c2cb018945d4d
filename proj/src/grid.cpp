#include "dnl/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dnl/errors.hpp"

namespace dnl {

double unit_sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

GridSpec GridSpec::refined() const {
  GridSpec s = *this;
  s.cells = 2 * cells;
  s.stretch = std::sqrt(stretch);
  return s;
}

RadialGrid RadialGrid::build(const GridSpec& spec) {
  if (spec.n < 1) throw ValidationError("grid dimension must be positive");
  if (spec.cells < 1) throw ValidationError("grid needs at least one cell");
  if (!(spec.r_max > 0.0)) throw ValidationError("grid.r_max must be positive");
  if (!(spec.stretch >= 1.0)) throw ValidationError("grid.stretch must be >= 1");

  RadialGrid g;
  g.spec_ = spec;
  const int N = spec.cells;
  const double s = spec.stretch;
  const double h0 = s == 1.0 ? spec.r_max / N : spec.r_max * (s - 1.0) / (std::pow(s, N) - 1.0);
  if (!(h0 > 0.0)) throw ValidationError("grid stretch too large for the requested cell count");

  g.edges_.resize(N + 1);
  g.edges_[0] = 0.0;
  double h = h0;
  for (int i = 1; i <= N; ++i) {
    g.edges_[i] = g.edges_[i - 1] + h;
    h *= s;
  }
  g.edges_[N] = spec.r_max;

  const double sigma = unit_sphere_area(spec.n);
  g.centers_.resize(N);
  g.volumes_.resize(N);
  g.areas_.resize(N + 1);
  for (int i = 0; i < N; ++i) {
    const double a = g.edges_[i], b = g.edges_[i + 1];
    if (!(b > a)) throw ValidationError("grid edges must be strictly increasing");
    g.centers_[i] = 0.5 * (a + b);
    g.volumes_[i] = sigma * (std::pow(b, spec.n) - std::pow(a, spec.n)) / spec.n;
  }
  for (int i = 0; i <= N; ++i) g.areas_[i] = sigma * std::pow(g.edges_[i], spec.n - 1);
  return g;
}

double RadialGrid::ball_volume() const {
  return unit_sphere_area(spec_.n) * std::pow(r_max(), spec_.n) / spec_.n;
}

double DensityField::mass() const {
  const auto w = grid->volumes();
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) total += w[i] * u[i];
  return total;
}

}  // namespace dnl
