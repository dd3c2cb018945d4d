#include "dnl/commands.hpp"

#include <cstdio>
#include <fstream>
#include <future>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>

#include "dnl/analysis.hpp"
#include "dnl/errors.hpp"
#include "dnl/io.hpp"
#include "dnl/spectral.hpp"

namespace dnl {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json provenance(const RunConfig& cfg) {
  return Json{{"config_hash", hex(config_hash(cfg))}, {"seed", cfg.seed}};
}

Json exponents_json(const Exponents& e) {
  return Json{{"m", e.m()},         {"p", e.p()},         {"n", e.n()},         {"q", e.q()},
              {"gamma", e.gamma()}, {"m_c", e.m_c()},     {"p_c", e.p_c()},     {"delta_p", e.delta_p()},
              {"alpha", e.alpha()}, {"theta", e.theta()}, {"m_star", e.m_star()}};
}

Json fit_json(const std::string& column, const RateFit& f) {
  return Json{{"column", column},       {"rate", f.rate},           {"intercept", f.intercept},
              {"tau_a", f.tau_a},       {"tau_b", f.tau_b},         {"first", f.first},
              {"last", f.last},         {"residual", f.residual},   {"r_squared", f.r_squared},
              {"floored", f.floored},   {"accepted", f.accepted}};
}

Json check_json(const Check& c, const std::string& prefix = {}) {
  Json j{{"name", prefix + c.name}, {"pass", c.pass}, {"slack", c.slack}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

Json gap_json(const GapResult& g) {
  return Json{{"eps", g.eps},
              {"beta_tilde", g.beta_tilde},
              {"beta", g.beta},
              {"sector_eigenvalues", g.sector_eigenvalues},
              {"argmin_sector", g.argmin_sector},
              {"refinement_delta", g.refinement_delta}};
}

Json chain_constants_json(const ChainConstants& c) {
  const ComparisonConstants& k = c.cc;
  Json j{{"eps", c.eps},         {"t0", c.t0},          {"beta_tilde", c.beta_tilde}, {"W0", k.W0},
         {"W1", k.W1},           {"alpha0", k.alpha0},  {"alpha1", k.alpha1},         {"alpha2", k.alpha2},
         {"kappa0", k.kappa0},   {"kappa1", c.kappa1},  {"kappa2", k.kappa2},         {"C_low", k.C_low},
         {"C_high", k.C_high},   {"delta", k.delta},    {"eta", c.eta},               {"divbound", k.divbound}};
  j["lambda"] = c.lambda ? Json(*c.lambda) : Json(nullptr);
  return j;
}

Json report(Json constants, Json fits, Json checks, const RunConfig& cfg) {
  return Json{{"constants", std::move(constants)},
              {"fits", std::move(fits)},
              {"checks", std::move(checks)},
              {"provenance", provenance(cfg)}};
}

std::string header_for(const RunConfig& cfg) {
  return header_block(Exponents::derive(cfg.m, cfg.p, cfg.n), config_hash(cfg), cfg.seed);
}

// The eps values at which the chain is evaluated: the configured sweep for
// p < 2, the unregularized gap for p > 2.
std::vector<double> chain_eps(const RunConfig& cfg) {
  if (cfg.p > 2.0) return {0.0};
  if (cfg.p == 2.0) return {cfg.spectral_eps.front()};
  return cfg.spectral_eps;
}

std::vector<GapResult> gaps_for(const DiscreteEquilibrium& ref, const RunConfig& cfg) {
  std::vector<GapResult> gaps;
  for (double eps : chain_eps(cfg)) gaps.push_back(hardy_poincare_constant(ref, eps, cfg.ell_max));
  return gaps;
}

WindowPolicy policy_for(const RunConfig& cfg) {
  WindowPolicy w;
  w.r2_min = cfg.r2_min;
  return w;
}

int verdict(const Json& checks) {
  for (const auto& c : checks)
    if (!c["pass"].get<bool>()) return 4;
  return 0;
}

}  // namespace

SimulationResult load_run(const RunConfig& cfg) {
  const fs::path dir = output_dir(cfg);
  const fs::path series_file = dir / "series.csv";
  {
    std::ifstream in(series_file);
    if (!in) throw ValidationError("no stored run at '" + dir.string() + "' (run simulate first)");
    const std::string want = "# config_hash = " + hex(config_hash(cfg));
    std::string line;
    bool match = false;
    while (std::getline(in, line) && !line.empty() && line[0] == '#')
      if (line == want) match = true;
    if (!match) throw ValidationError("'" + series_file.string() + "' was written by a different config");
  }
  SimulationResult res = prepare_simulation(to_simulation(cfg));
  for (const SeriesRow& row : read_series_csv(series_file)) res.series.append(row);
  res.snapshots = read_snapshots_csv(dir / "snapshots.csv", res.reference->cells());
  if (res.series.empty() || res.snapshots.empty()) throw ValidationError("stored run in '" + dir.string() + "' is empty");
  return res;
}

int cmd_profile(const RunConfig& cfg, std::ostream& out) {
  SimulationConfig sc = to_simulation(cfg);
  sc.tau_end = std::max(sc.tau_end, sc.cadence);
  const SimulationResult run = prepare_simulation(sc);
  const DiscreteEquilibrium& ref = *run.reference;
  const Exponents& e = ref.exponents();
  const BarenblattProfile u0(e, run.bounds.D0), u1(e, run.bounds.D1);
  const BarenblattProfile& us = ref.profile();

  std::ostringstream o;
  o << header_for(cfg);
  o << "# Dstar = " << format_number(us.D()) << "\n";
  o << "# Dstar_continuum = " << format_number(run.Dstar_continuum) << "\n";
  o << "# D0 = " << format_number(run.bounds.D0) << "\n";
  o << "# D1 = " << format_number(run.bounds.D1) << "\n";
  o << "# W0 = " << format_number(run.bounds.W0) << "\n";
  o << "# W1 = " << format_number(run.bounds.W1) << "\n";
  o << "# mass = " << format_number(ref.mass()) << "\n";
  o << "# eps = " << format_number(cfg.eps) << "\n";
  o << "r,u_Dstar,u_D0,u_D1,mu_density,nu_eps_density\n";
  for (double r : ref.grid().centers())
    o << format_number(r) << "," << format_number(us(r)) << "," << format_number(u0(r)) << "," << format_number(u1(r))
      << "," << format_number(us.mu_density(r)) << "," << format_number(us.nu_density(r, cfg.eps)) << "\n";
  const fs::path file = output_dir(cfg) / "profile.csv";
  write_text(file, o.str());
  out << "profile: D* = " << format_number(us.D()) << ", " << ref.cells() << " cells -> " << file.string() << "\n";
  return 0;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const SimulationResult run = simulate(to_simulation(cfg));
  const fs::path dir = output_dir(cfg);
  const std::string header = header_for(cfg);
  write_text(dir / "config.conf", serialize(cfg));
  write_series_csv(dir / "series.csv", run.series, header);
  write_snapshots_csv(dir / "snapshots.csv", run.snapshots, run.reference->grid(), header);

  const auto& rows = run.series.rows();
  double drift = 0.0;
  for (const auto& r : rows) drift = std::max(drift, std::abs(r.mass - rows.front().mass) / rows.front().mass);
  Json constants = exponents_json(run.reference->exponents());
  constants["Dstar"] = run.reference->profile().D();
  constants["Dstar_continuum"] = run.Dstar_continuum;
  constants["D0"] = run.bounds.D0;
  constants["D1"] = run.bounds.D1;
  constants["W0"] = run.bounds.W0;
  constants["W1"] = run.bounds.W1;
  constants["mass"] = rows.front().mass;
  constants["mass_drift"] = drift;
  constants["eps_reg"] = run.eps_reg;
  constants["h_min"] = run.reference->grid().h_min();
  constants["steps"] = run.steps;
  constants["samples"] = rows.size();
  constants["snapshots"] = run.snapshots.size();
  constants["max_grad_monitor"] = run.max_grad_monitor;
  constants["max_phi_eps"] = run.max_phi_eps;
  constants["clipped_mass"] = rows.back().clipped_mass;
  write_json(dir / "run.json", report(constants, Json::array(), Json::array(), cfg));
  out << "simulate: " << rows.size() << " samples, " << run.steps << " steps, E_rel(end) = "
      << format_number(rows.back().f.E_rel) << " -> " << dir.string() << "\n";
  return 0;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  SimulationConfig sc = to_simulation(cfg);
  const SimulationResult run = prepare_simulation(sc);
  const BarenblattProfile& profile = run.reference->profile();
  Json gaps = Json::array();
  Json checks = Json::array();
  for (double eps : cfg.spectral_eps) {
    const GapResult g = hardy_poincare_refined(profile, sc.grid, eps, cfg.ell_max);
    gaps.push_back(gap_json(g));
    checks.push_back(Json{{"name", "beta_tilde_positive(eps=" + format_number(eps) + ")"},
                          {"pass", g.beta_tilde > 0.0 && std::isfinite(g.beta_tilde)},
                          {"slack", g.beta_tilde}});
    out << "spectrum: eps = " << format_number(eps) << " beta~ = " << format_number(g.beta_tilde)
        << " beta = " << format_number(g.beta) << " argmin l = " << g.argmin_sector
        << " refinement delta = " << format_number(g.refinement_delta) << "\n";
  }
  Json constants = exponents_json(profile.exponents());
  constants["Dstar"] = profile.D();
  constants["cells"] = sc.grid.refined().cells;
  constants["ell_max"] = cfg.ell_max;
  constants["gaps"] = gaps;
  const fs::path file = output_dir(cfg) / "spectrum.json";
  write_json(file, report(constants, Json::array(), checks, cfg));
  return verdict(checks);
}

int cmd_rates(const RunConfig& cfg, std::ostream& out) {
  const SimulationResult run = load_run(cfg);
  const WindowPolicy policy = policy_for(cfg);
  Json fits = Json::array();
  for (const char* column : {"E_rel", "E_lin", "I_rel", "L1_dist"})
    fits.push_back(fit_json(column, fit_exponential(run.series, column, policy)));
  const RateFit E = fit_exponential(run.series, "E_rel", policy);
  Json constants{{"lambda_emp", E.rate}, {"delta_p", run.reference->exponents().delta_p()}};
  // Fitted intercepts stand in for the constant M of the decay estimate.
  constants["M_entropy"] = std::exp(E.intercept);
  write_json(output_dir(cfg) / "rates.json", report(constants, fits, Json::array(), cfg));
  out << "rates: lambda_emp = " << format_number(E.rate) << " on [" << format_number(E.tau_a) << ", "
      << format_number(E.tau_b) << "], r^2 = " << format_number(E.r_squared) << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const SimulationResult run = load_run(cfg);
  const std::vector<GapResult> gaps = gaps_for(*run.reference, cfg);
  const TheoremReport thm = verify_theorem1(run, gaps, policy_for(cfg));

  Json checks = Json::array();
  for (const Check& c : thm.checks) checks.push_back(check_json(c));

  // Chain at the (eps, t0) that produced lambda_theo; otherwise at the first
  // gap on the final snapshot.
  const GapResult* gap = &gaps.front();
  double t_from = run.snapshots.back().tau;
  if (thm.best) {
    for (const GapResult& g : gaps)
      if (g.eps == thm.best->eps) gap = &g;
    t_from = thm.best->t0;
  }
  const ChainReport chain = verify_logsob_chain(run, *gap, t_from);
  for (const Check& c : chain.checks) checks.push_back(check_json(c, "chain."));

  Json constants = exponents_json(run.reference->exponents());
  constants["Dstar"] = run.reference->profile().D();
  constants["lambda_emp"] = thm.lambda_emp;
  constants["lambda_theo"] = thm.lambda_theo;
  constants["at_floor"] = thm.at_floor;
  constants["loglog_slope"] = thm.loglog_slope;
  constants["loglog_target"] = thm.loglog_target;
  constants["chain"] = thm.best ? chain_constants_json(*thm.best) : chain_constants_json(chain_constants(run, *gap, t_from));
  Json gj = Json::array();
  for (const GapResult& g : gaps) gj.push_back(gap_json(g));
  constants["gaps"] = gj;
  constants["chain_snapshots"] = chain.snapshots_checked;
  constants["chain_deferred"] = chain.deferred;

  Json fits = Json::array();
  fits.push_back(fit_json("E_rel", thm.entropy_fit));
  fits.push_back(fit_json("L1_dist", thm.l1_fit));
  write_json(output_dir(cfg) / "verify.json", report(constants, fits, checks, cfg));

  const int code = verdict(checks);
  out << "verify: lambda_emp = " << format_number(thm.lambda_emp) << ", lambda_theo = "
      << format_number(thm.lambda_theo) << ", " << checks.size() << " checks, " << (code ? "FAIL" : "pass") << "\n";
  return code;
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const SimulationResult run = load_run(cfg);
  const std::vector<GapResult> gaps = gaps_for(*run.reference, cfg);
  Json checks = Json::array();
  Json per_eps = Json::array();
  for (const GapResult& g : gaps) {
    char tag_buf[48];
    std::snprintf(tag_buf, sizeof tag_buf, "eps=%g.", g.eps);
    const std::string tag = tag_buf;
    const ChainReport chain = verify_logsob_chain(run, g, 0.0);
    for (const Check& c : chain.checks) checks.push_back(check_json(c, tag));
    const TestFunctionReport tf = random_test_functions(*run.reference, g, cfg.seed);
    checks.push_back(Json{{"name", tag + "hardy_poincare_random_tests"},
                          {"pass", tf.worst_margin >= -1e-10},
                          {"slack", tf.worst_margin}});
    per_eps.push_back(Json{{"eps", g.eps},
                           {"beta_tilde", g.beta_tilde},
                           {"snapshots_checked", chain.snapshots_checked},
                           {"deferred", chain.deferred},
                           {"test_functions", tf.samples}});
  }
  Json constants{{"evaluations", per_eps}};
  write_json(output_dir(cfg) / "check.json", report(constants, Json::array(), checks, cfg));
  const int code = verdict(checks);
  out << "check: " << checks.size() << " checks over " << run.snapshots.size() << " snapshots, "
      << (code ? "FAIL" : "pass") << "\n";
  return code;
}

int run_command(const std::string& command, const std::vector<fs::path>& configs, std::ostream& out,
                std::ostream& err) {
  using Fn = int (*)(const RunConfig&, std::ostream&);
  Fn fn = nullptr;
  if (command == "profile") fn = cmd_profile;
  else if (command == "simulate") fn = cmd_simulate;
  else if (command == "spectrum") fn = cmd_spectrum;
  else if (command == "rates") fn = cmd_rates;
  else if (command == "verify") fn = cmd_verify;
  else if (command == "check") fn = cmd_check;
  if (!fn) {
    err << "unknown command '" << command << "'\n";
    return 2;
  }
  if (configs.empty()) {
    err << command << ": no config given\n";
    return 2;
  }

  std::mutex io;
  auto one = [&](const fs::path& file) -> int {
    std::ostringstream local;
    int code = 0;
    try {
      const RunConfig cfg = load_config(file);
      code = fn(cfg, local);
    } catch (const Error& e) {
      local << file.string() << ": error: " << e.what() << "\n";
      code = e.exit_code();
    } catch (const fs::filesystem_error& e) {
      local << file.string() << ": error: " << e.what() << "\n";
      code = 2;
    } catch (const std::exception& e) {
      local << file.string() << ": error: " << e.what() << "\n";
      code = 3;
    }
    std::lock_guard lock(io);
    (code == 0 || code == 4 ? out : err) << local.str();
    return code;
  };

  if (configs.size() == 1) return one(configs.front());

  // Sweeps: outputs must not collide.
  std::set<fs::path> dirs;
  for (const fs::path& f : configs) {
    try {
      if (!dirs.insert(output_dir(load_config(f))).second) {
        err << f.string() << ": error: output.path collides with another config in the sweep\n";
        return 2;
      }
    } catch (const Error& e) {
      err << f.string() << ": error: " << e.what() << "\n";
      return e.exit_code();
    }
  }
  std::vector<std::future<int>> jobs;
  for (const fs::path& f : configs) jobs.push_back(std::async(std::launch::async, one, f));
  int worst = 0;
  for (auto& j : jobs) worst = std::max(worst, j.get());
  return worst;
}

}  // namespace dnl
