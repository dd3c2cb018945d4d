#include "dnl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "dnl/errors.hpp"

namespace dnl {

double mobility(double s, double p, double eps) {
  if (eps == 0.0) return grad_cost_conjugate_1d(s, p);
  const double t = std::pow(eps + std::abs(s), p - 1.0) - std::pow(eps, p - 1.0);
  return s < 0.0 ? -t : t;
}

double mobility_derivative(double s, double p, double eps) {
  const double t = eps + std::abs(s);
  if (t == 0.0) return p < 2.0 ? std::numeric_limits<double>::infinity() : (p == 2.0 ? 1.0 : 0.0);
  return (p - 1.0) * std::pow(t, p - 2.0);
}

Solver::Solver(const DiscreteEquilibrium& reference, SolverOptions options)
    : ref_(reference), opt_(options) {
  const double p = ref_.exponents().p();
  if (!(opt_.safety > 0.0 && opt_.safety <= 1.0)) throw ValidationError("time.safety must be in (0, 1]");
  eps_reg_ = opt_.eps_reg < 0.0 ? (p < 2.0 ? ref_.grid().h_min() : 0.0) : opt_.eps_reg;

  const auto ss = ref_.edge_grad();
  const auto edges = ref_.grid().edges();
  Gstar_.resize(ss.size());
  drift_edge_.resize(ss.size());
  for (std::size_t j = 0; j < ss.size(); ++j) {
    Gstar_[j] = mobility(ss[j], p, eps_reg_);
    drift_edge_[j] = edges[j + 1];
  }
  const std::size_t N = ref_.cells();
  psi_.resize(N);
  f2_.resize(N);
  diag_.resize(N);
  flux_.resize(ss.size());
}

void Solver::evaluate(const std::vector<double>& u) const {
  const Exponents& e = ref_.exponents();
  const double g = e.gamma(), p = e.p();
  const auto us = ref_.u();
  const auto fp = ref_.fprime();
  const auto fs = ref_.fsecond();
  const std::size_t N = u.size();
  if (N != ref_.cells()) throw ValidationError("field and reference grid differ");

  for (std::size_t i = 0; i < N; ++i) {
    // Clipped cells sit at a tiny positive quotient so F' stays finite.
    const double delta = u[i] > 0.0 ? u[i] / us[i] - 1.0 : -1.0 + 1e-12;
    const double L = std::log1p(delta);
    psi_[i] = fp[i] * std::expm1((g - 1.0) * L);
    f2_[i] = fs[i] * std::exp((g - 2.0) * L);
    diag_[i] = 0.0;
  }

  const auto dr = ref_.spacing();
  const auto A = ref_.edge_area();
  const auto ss = ref_.edge_grad();
  const auto w = ref_.grid().volumes();
  const double epw = eps_reg_ == 0.0 ? 0.0 : std::pow(eps_reg_, p - 1.0);
  const bool balanced = opt_.drift == DriftForm::balanced;

  for (std::size_t j = 0; j + 1 < N; ++j) {
    const double inv_dr = 1.0 / dr[j];
    const double s = ss[j] + (psi_[j + 1] - psi_[j]) * inv_dr;
    const double t = eps_reg_ + std::abs(s);
    double G, dG;
    if (t == 0.0) {
      G = 0.0;
      dG = mobility_derivative(0.0, p, 0.0);
    } else {
      const double tp = std::pow(t, p - 1.0);
      G = s < 0.0 ? -(tp - epw) : tp - epw;
      dG = (p - 1.0) * tp / t;
    }
    const double ue = 0.5 * (u[j] + u[j + 1]);
    const double base = balanced ? G - Gstar_[j] : G + drift_edge_[j];
    flux_[j] = ue * base;

    const double half = 0.5 * std::abs(base);
    const double k = ue * dG * inv_dr;
    diag_[j] += A[j] * (half + k * f2_[j]) / w[j];
    diag_[j + 1] += A[j] * (half + k * f2_[j + 1]) / w[j + 1];
  }
}

double Solver::flux(const DensityField& field, std::size_t edge) const {
  if (edge >= ref_.interior_edges()) throw ValidationError("flux needs an interior edge index");
  evaluate(field.u);
  if (!std::isfinite(flux_[edge])) throw NumericalError("non-finite flux at edge " + std::to_string(edge));
  return flux_[edge];
}

double Solver::stable_dt(const DensityField& field) const {
  evaluate(field.u);
  const double dmax = *std::max_element(diag_.begin(), diag_.end());
  if (!std::isfinite(dmax)) throw NumericalError("non-finite stiffness estimate");
  return dmax > 0.0 ? opt_.safety / dmax : std::numeric_limits<double>::infinity();
}

double Solver::step(TimeState& state, double dt_max) const {
  std::vector<double>& u = state.field.u;
  evaluate(u);
  const std::size_t N = u.size();
  double dmax = 0.0;
  for (std::size_t i = 0; i < N; ++i) dmax = std::max(dmax, diag_[i]);
  for (std::size_t j = 0; j + 1 < N; ++j) {
    if (!std::isfinite(flux_[j]))
      throw NumericalError("non-finite flux at r = " + std::to_string(ref_.grid().edges()[j + 1]) +
                           ", tau = " + std::to_string(state.tau));
  }
  if (!std::isfinite(dmax)) throw NumericalError("non-finite stiffness at tau = " + std::to_string(state.tau));
  const double dt_stable = dmax > 0.0 ? opt_.safety / dmax : dt_max;
  if (dt_stable < opt_.min_dt)
    throw NumericalError("time step underflow (dt = " + std::to_string(dt_stable) +
                         ") at tau = " + std::to_string(state.tau));
  const double dt = std::min(dt_stable, dt_max);

  const auto A = ref_.edge_area();
  const auto w = ref_.grid().volumes();
  const auto us = ref_.u();
  const bool strict = opt_.sandwich_tol > 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    double net = 0.0;
    if (i + 1 < N) net += A[i] * flux_[i];
    if (i > 0) net -= A[i - 1] * flux_[i - 1];
    double next = u[i] + dt / w[i] * net;
    if (next < 0.0) {
      state.clipped_mass += -next * w[i];
      next = 0.0;
    }
    u[i] = next;
    if (strict) {
      const double q = next / us[i];
      if (q < W0_ - opt_.sandwich_tol || q > W1_ + opt_.sandwich_tol)
        throw SandwichViolation("quotient u/u* = " + std::to_string(q) + " left the sandwich at tau = " +
                                    std::to_string(state.tau + dt),
                                ref_.grid().centers()[i]);
    }
  }
  state.tau += dt;
  state.last_dt = dt;
  ++state.step_count;
  return dt;
}

// ---------------------------------------------------------------------------

std::optional<InitShape> parse_shape(const std::string& name) {
  if (name == "equilibrium") return InitShape::equilibrium;
  if (name == "step") return InitShape::step;
  if (name == "step_inverted") return InitShape::step_inverted;
  return std::nullopt;
}

std::string to_string(InitShape shape) {
  switch (shape) {
    case InitShape::equilibrium: return "equilibrium";
    case InitShape::step: return "step";
    case InitShape::step_inverted: return "step_inverted";
  }
  return "?";
}

InitialData build_initial_data(const Exponents& e, GridPtr grid, const InitSpec& spec) {
  if (!(spec.D1 > 0.0) || !(spec.D0 >= spec.D1))
    throw ValidationError("init.D0 >= init.D1 > 0 required");
  if (spec.shape != InitShape::equilibrium && !(spec.width > 0.0))
    throw ValidationError("init.width must be positive");

  const double D0 = spec.D0;
  const double D1 = spec.shape == InitShape::equilibrium ? spec.D0 : spec.D1;
  const auto r = grid->centers();
  const std::size_t N = r.size();
  const double k = e.profile_slope(), pw = e.profile_power(), q = e.q();
  const double l0 = std::log(spec.D0), l1 = std::log(spec.D1);

  std::vector<double> u(N);
  for (std::size_t i = 0; i < N; ++i) {
    double D = spec.D0;
    if (spec.shape != InitShape::equilibrium) {
      double S = 0.5 * (1.0 + std::tanh((r[i] - spec.r0) / spec.width));
      if (spec.shape == InitShape::step_inverted) S = 1.0 - S;
      D = std::exp(l1 + (l0 - l1) * S);
    }
    u[i] = std::pow(D + k * std::pow(r[i], q), pw);
  }

  InitialData out{DensityField{grid, e, std::move(u)}, 0.0, D0, D1};
  out.mass = out.field.mass();
  if (spec.mass) {
    if (!(*spec.mass > 0.0)) throw ValidationError("init.mass must be positive");
    const double scale = *spec.mass / out.mass;
    for (double& x : out.field.u) x *= scale;
    out.mass = out.field.mass();
  }

  const double tol = 1e-12;
  for (std::size_t i = 0; i < N; ++i) {
    const double c = k * std::pow(r[i], q);
    const double lo = std::pow(out.D0 + c, pw), hi = std::pow(out.D1 + c, pw);
    const double x = out.field.u[i];
    if (x < lo * (1.0 - tol) || x > hi * (1.0 + tol))
      throw SandwichViolation("initial data leaves the Barenblatt sandwich at r = " + std::to_string(r[i]), r[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

SimulationResult prepare_simulation(const SimulationConfig& cfg) {
  const Exponents e = Exponents::derive(cfg.m, cfg.p, cfg.n);
  if (validate_range(e) == RangeClass::mass_losing)
    throw DivergentMassError("m <= m_c: Barenblatt mass diverges");
  if (!(cfg.tau_end > 0.0)) throw ValidationError("time.tau_end must be positive");
  if (!(cfg.cadence > 0.0)) throw ValidationError("output.cadence must be positive");
  if (e.p() < 2.0 && !(cfg.eps > 0.0)) throw ValidationError("reg.eps must be positive when p < 2");

  GridSpec gs = cfg.grid;
  gs.n = cfg.n;
  auto grid = std::make_shared<const RadialGrid>(RadialGrid::build(gs));
  const InitialData init = build_initial_data(e, grid, cfg.init);

  SimulationResult res;
  auto ref = std::make_shared<const DiscreteEquilibrium>(DiscreteEquilibrium::mass_matched(e, grid, init.mass));
  res.reference = ref;
  res.Dstar_continuum = solve_Dstar(e, init.mass).D();
  const double Dstar = std::clamp(ref->profile().D(), init.D1, init.D0);
  res.bounds = sandwich_bounds(e, init.D0, init.D1, Dstar);
  res.eps_reg = Solver(*ref, cfg.solver).eps_reg();

  res.series.meta.config_hash = cfg.config_hash;
  res.series.meta.seed = cfg.seed;
  res.series.meta.m = cfg.m;
  res.series.meta.p = cfg.p;
  res.series.meta.n = cfg.n;
  res.series.meta.grid = gs;
  res.series.meta.Dstar = ref->profile().D();
  res.series.meta.eps = cfg.eps;
  res.series.meta.W0 = res.bounds.W0;
  res.series.meta.W1 = res.bounds.W1;
  return res;
}

SimulationResult simulate(const SimulationConfig& cfg) {
  SimulationResult res = prepare_simulation(cfg);
  const DiscreteEquilibrium* ref = res.reference.get();
  const InitialData init = build_initial_data(ref->exponents(), ref->grid_ptr(), cfg.init);

  Solver solver(*ref, cfg.solver);
  solver.set_sandwich(res.bounds.W0, res.bounds.W1);

  TimeState state{0.0, init.field, 0, 0.0, 0.0};

  auto record = [&]() {
    SeriesRow row;
    row.tau = state.tau;
    row.mass = state.field.mass();
    row.f = sample_functionals(state.field.u, *ref, cfg.eps);
    row.clipped_mass = state.clipped_mass;
    res.max_grad_monitor = std::max(res.max_grad_monitor, row.f.grad_monitor);
    if (std::isfinite(row.f.phi_eps)) res.max_phi_eps = std::max(res.max_phi_eps, row.f.phi_eps);
    res.series.append(row);
  };
  auto snap = [&]() { res.snapshots.push_back(Snapshot{state.tau, state.field.u}); };

  record();
  if (cfg.snapshot_cadence > 0.0) snap();

  long k_sample = 1, k_snap = 1;
  while (state.tau < cfg.tau_end) {
    double next = std::min(cfg.tau_end, k_sample * cfg.cadence);
    if (cfg.snapshot_cadence > 0.0) next = std::min(next, k_snap * cfg.snapshot_cadence);
    const double dt = solver.step(state, next - state.tau);
    if (!(dt > 0.0)) throw NumericalError("time step collapsed at tau = " + std::to_string(state.tau));
    if (std::abs(state.tau - next) <= 1e-12 * std::max(1.0, next)) state.tau = next;

    bool hit_sample = false;
    while (k_sample * cfg.cadence <= state.tau * (1.0 + 1e-14)) {
      ++k_sample;
      hit_sample = true;
    }
    if (hit_sample || state.tau >= cfg.tau_end) record();
    if (cfg.snapshot_cadence > 0.0) {
      bool hit_snap = false;
      while (k_snap * cfg.snapshot_cadence <= state.tau * (1.0 + 1e-14)) {
        ++k_snap;
        hit_snap = true;
      }
      if (hit_snap) snap();
    }
  }
  if (cfg.snapshot_cadence <= 0.0 || res.snapshots.back().tau < state.tau) snap();
  res.steps = state.step_count;
  return res;
}

// ---------------------------------------------------------------------------

OriginalVariables to_original_variables(const Exponents& e, const RadialGrid& grid, double tau,
                                        std::span<const double> u) {
  if (tau < 0.0) throw ValidationError("tau must be nonnegative");
  if (u.size() != grid.cells()) throw ValidationError("field and grid differ");
  const double d = e.delta_p();
  const int n = e.n();
  OriginalVariables ov;
  ov.R = std::exp(tau);
  ov.t = std::expm1(d * tau) / d;
  const double Rn = std::pow(ov.R, n);
  const auto r = grid.centers();
  const auto w = grid.volumes();
  ov.x.resize(u.size());
  ov.rho.resize(u.size());
  ov.volumes.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    ov.x[i] = ov.R * r[i];
    ov.rho[i] = u[i] / Rn;
    ov.volumes[i] = w[i] * Rn;
  }
  return ov;
}

double tau_from_t(const Exponents& e, double t) {
  if (t < 0.0) throw ValidationError("t must be nonnegative");
  return std::log1p(e.delta_p() * t) / e.delta_p();
}

std::vector<double> to_rescaled_density(const Exponents& e, const OriginalVariables& ov) {
  const double Rn = std::pow(ov.R, e.n());
  std::vector<double> u(ov.rho.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = ov.rho[i] * Rn;
  return u;
}

}  // namespace dnl
