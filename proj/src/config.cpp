#include "dnl/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "dnl/errors.hpp"

namespace dnl {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x))
    throw ValidationError("config key '" + key + "': expected a number, got '" + v + "'");
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long x = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end)
    throw ValidationError("config key '" + key + "': expected an integer, got '" + v + "'");
  return x;
}

class Table {
 public:
  explicit Table(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  const std::string* find(const std::string& key) {
    used_.insert(key);
    auto it = kv_.find(key);
    return it == kv_.end() ? nullptr : &it->second;
  }
  const std::string& need(const std::string& key) {
    const std::string* v = find(key);
    if (!v) throw ValidationError("missing config key '" + key + "'");
    return *v;
  }
  double real(const std::string& key) { return to_double(key, need(key)); }
  int integer(const std::string& key) { return static_cast<int>(to_integer(key, need(key))); }
  double real_or(const std::string& key, double fallback) {
    const std::string* v = find(key);
    return v ? to_double(key, *v) : fallback;
  }
  void reject_unknown() const {
    for (const auto& [k, v] : kv_)
      if (!used_.count(k)) throw ValidationError("unknown config key '" + k + "'");
  }

 private:
  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (value.empty()) throw ValidationError("config key '" + key + "' has no value");
    if (!kv.emplace(key, value).second) throw ValidationError("duplicate config key '" + key + "'");
  }
  return kv;
}

RunConfig parse_config(const std::string& text) {
  Table t(parse_key_values(text));
  RunConfig c;
  c.m = t.real("m");
  c.p = t.real("p");
  c.n = t.integer("n");
  c.grid.n = c.n;
  c.grid.r_max = t.real("grid.r_max");
  c.grid.cells = t.integer("grid.cells");
  c.grid.stretch = t.real("grid.stretch");

  c.tau_end = t.real("time.tau_end");
  c.safety = t.real_or("time.safety", c.safety);

  c.init.D0 = t.real("init.D0");
  c.init.D1 = t.real("init.D1");
  const std::string& shape = t.need("init.shape");
  const auto parsed = parse_shape(shape);
  if (!parsed) throw ValidationError("config key 'init.shape': unknown shape '" + shape + "'");
  c.init.shape = *parsed;
  c.init.r0 = t.real_or("init.r0", c.init.r0);
  c.init.width = t.real_or("init.width", c.init.width);
  if (const std::string* v = t.find("init.mass")) c.init.mass = to_double("init.mass", *v);

  c.eps = t.real("reg.eps");
  if (const std::string* v = t.find("reg.eps_reg")) c.eps_reg = to_double("reg.eps_reg", *v);

  if (const std::string* v = t.find("spectral.ell_max")) c.ell_max = static_cast<int>(to_integer("spectral.ell_max", *v));
  if (const std::string* v = t.find("spectral.eps")) {
    c.spectral_eps.clear();
    std::istringstream list(*v);
    std::string item;
    while (std::getline(list, item, ',')) c.spectral_eps.push_back(to_double("spectral.eps", trim(item)));
  }

  c.cadence = t.real("output.cadence");
  c.snapshot_cadence = t.real_or("output.snapshot_cadence", c.snapshot_cadence);
  c.path = t.need("output.path");

  c.r2_min = t.real_or("analysis.r2_min", c.r2_min);
  if (const std::string* v = t.find("seed")) {
    const long long s = to_integer("seed", *v);
    if (s < 0) throw ValidationError("config key 'seed' must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  t.reject_unknown();
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot read config file '" + file.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const RunConfig& c) {
  auto bad = [](const std::string& key, const std::string& why) {
    throw ValidationError("config key '" + key + "': " + why);
  };
  if (!(c.p > 1.0)) bad("p", "must exceed 1");
  if (c.n < 3) bad("n", "must be at least 3");
  if (!(c.m > 0.0)) bad("m", "must be positive");
  std::optional<Exponents> ex;
  try {
    ex = Exponents::derive(c.m, c.p, c.n);
  } catch (const ValidationError& err) {
    bad("m", err.what());
  }
  const Exponents& e = *ex;
  if (validate_range(e) != RangeClass::in_range)
    bad("m", "outside m_c < m < (n-p+1)/(n(p-1)) (" + std::string(to_string(validate_range(e))) + ")");
  if (!(c.grid.r_max > 0.0)) bad("grid.r_max", "must be positive");
  if (c.grid.cells < 16) bad("grid.cells", "must be at least 16");
  if (!(c.grid.stretch >= 1.0)) bad("grid.stretch", "must be at least 1");
  if (!(c.tau_end > 0.0)) bad("time.tau_end", "must be positive");
  if (!(c.safety > 0.0 && c.safety <= 1.0)) bad("time.safety", "must lie in (0, 1]");
  if (!(c.init.D1 > 0.0)) bad("init.D1", "must be positive");
  if (!(c.init.D0 >= c.init.D1)) bad("init.D0", "must be at least init.D1");
  if (!(c.init.r0 > 0.0)) bad("init.r0", "must be positive");
  if (!(c.init.width > 0.0)) bad("init.width", "must be positive");
  if (c.init.mass && !(*c.init.mass > 0.0)) bad("init.mass", "must be positive");
  if (!(c.eps > 0.0)) bad("reg.eps", "must be positive");
  if (c.eps_reg && !(*c.eps_reg >= 0.0)) bad("reg.eps_reg", "must be nonnegative");
  if (c.ell_max < 1) bad("spectral.ell_max", "must be at least 1");
  if (c.spectral_eps.empty()) bad("spectral.eps", "needs at least one value");
  for (double x : c.spectral_eps) {
    if (!(x >= 0.0)) bad("spectral.eps", "values must be nonnegative");
    if (x == 0.0 && c.p < 2.0) bad("spectral.eps", "eps = 0 is singular for p < 2");
  }
  if (!(c.cadence > 0.0)) bad("output.cadence", "must be positive");
  if (!(c.snapshot_cadence > 0.0)) bad("output.snapshot_cadence", "must be positive");
  if (c.path.empty()) bad("output.path", "must not be empty");
  if (!(c.r2_min > 0.0 && c.r2_min < 1.0)) bad("analysis.r2_min", "must lie in (0, 1)");
}

std::string serialize(const RunConfig& c) {
  std::ostringstream o;
  o << "m = " << fmt(c.m) << "\n";
  o << "p = " << fmt(c.p) << "\n";
  o << "n = " << c.n << "\n";
  o << "seed = " << c.seed << "\n";
  o << "grid.r_max = " << fmt(c.grid.r_max) << "\n";
  o << "grid.cells = " << c.grid.cells << "\n";
  o << "grid.stretch = " << fmt(c.grid.stretch) << "\n";
  o << "time.tau_end = " << fmt(c.tau_end) << "\n";
  o << "time.safety = " << fmt(c.safety) << "\n";
  o << "init.D0 = " << fmt(c.init.D0) << "\n";
  o << "init.D1 = " << fmt(c.init.D1) << "\n";
  o << "init.shape = " << to_string(c.init.shape) << "\n";
  o << "init.r0 = " << fmt(c.init.r0) << "\n";
  o << "init.width = " << fmt(c.init.width) << "\n";
  if (c.init.mass) o << "init.mass = " << fmt(*c.init.mass) << "\n";
  o << "reg.eps = " << fmt(c.eps) << "\n";
  if (c.eps_reg) o << "reg.eps_reg = " << fmt(*c.eps_reg) << "\n";
  o << "spectral.ell_max = " << c.ell_max << "\n";
  o << "spectral.eps = ";
  for (std::size_t i = 0; i < c.spectral_eps.size(); ++i) o << (i ? ", " : "") << fmt(c.spectral_eps[i]);
  o << "\n";
  o << "output.cadence = " << fmt(c.cadence) << "\n";
  o << "output.snapshot_cadence = " << fmt(c.snapshot_cadence) << "\n";
  o << "output.path = " << c.path << "\n";
  o << "analysis.r2_min = " << fmt(c.r2_min) << "\n";
  return o.str();
}

std::uint64_t config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SimulationConfig to_simulation(const RunConfig& c) {
  SimulationConfig s;
  s.m = c.m;
  s.p = c.p;
  s.n = c.n;
  s.grid = c.grid;
  s.grid.n = c.n;
  s.init = c.init;
  s.tau_end = c.tau_end;
  s.cadence = c.cadence;
  s.snapshot_cadence = c.snapshot_cadence;
  s.eps = c.eps;
  s.solver.safety = c.safety;
  if (c.eps_reg) s.solver.eps_reg = *c.eps_reg;
  s.config_hash = config_hash(c);
  s.seed = c.seed;
  return s;
}

std::filesystem::path output_dir(const RunConfig& c) {
  const std::filesystem::path base(c.path);
  if (const char* env = std::getenv("DNL_OUTPUT_DIR"); env && *env) {
    std::filesystem::path leaf = base.filename();
    if (leaf.empty()) leaf = base.parent_path().filename();
    return std::filesystem::path(env) / leaf;
  }
  return base;
}

}  // namespace dnl
