// Radial reduction of R^n: shells [r_{i-1/2}, r_{i+1/2}] with exact volumes,
// and nonnegative cell-averaged densities living on them.

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "dnl/exponents.hpp"

namespace dnl {

/// Surface area of the unit sphere in R^n, 2 pi^{n/2} / Gamma(n/2).
double unit_sphere_area(int n);

struct GridSpec {
  int n = 3;
  double r_max = 1.0;
  int cells = 16;
  double stretch = 1.0;

  /// Same outer radius with twice the cells: every spacing roughly halves.
  GridSpec refined() const;

  bool operator==(const GridSpec&) const = default;
};

class RadialGrid {
 public:
  /// Geometric spacing dr_i = h0 stretch^i summing to r_max; stretch = 1 is
  /// uniform. Throws ValidationError on degenerate parameters.
  static RadialGrid build(const GridSpec& spec);
  static RadialGrid build(int n, double r_max, int cells, double stretch) {
    return build(GridSpec{n, r_max, cells, stretch});
  }

  const GridSpec& spec() const { return spec_; }
  int n() const { return spec_.n; }
  std::size_t cells() const { return centers_.size(); }
  double r_max() const { return edges_.back(); }
  double h_min() const { return edges_[1] - edges_[0]; }

  std::span<const double> edges() const { return edges_; }
  std::span<const double> centers() const { return centers_; }
  /// Shell volumes sigma_{n-1} (r_{i+1/2}^n - r_{i-1/2}^n)/n.
  std::span<const double> volumes() const { return volumes_; }
  /// Sphere areas sigma_{n-1} r^{n-1} at every edge (zero at the origin).
  std::span<const double> areas() const { return areas_; }

  double ball_volume() const;

 private:
  GridSpec spec_;
  std::vector<double> edges_, centers_, volumes_, areas_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

struct DensityField {
  GridPtr grid;
  Exponents exponents;
  std::vector<double> u;

  double mass() const;
};

}  // namespace dnl
