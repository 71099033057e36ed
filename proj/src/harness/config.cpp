#include "godel/harness/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <variant>
#include <vector>

namespace godel::harness {

namespace {

using Field = std::variant<double RunConfig::*, int RunConfig::*, std::uint64_t RunConfig::*,
                           bool RunConfig::*, std::string RunConfig::*>;

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> f = {
      {"scenario", &RunConfig::scenario},
      {"output_dir", &RunConfig::output_dir},
      {"omega", &RunConfig::omega},
      {"sigma", &RunConfig::sigma},
      {"s_max", &RunConfig::s_max},
      {"ds", &RunConfig::ds},
      {"stride", &RunConfig::stride},
      {"paths", &RunConfig::paths},
      {"seed", &RunConfig::seed},
      {"threads", &RunConfig::threads},
      {"scheme", &RunConfig::scheme},
      {"window_fraction", &RunConfig::window_fraction},
      {"abort_fraction", &RunConfig::abort_fraction},
      {"check_doubling", &RunConfig::check_doubling},
      {"initial", &RunConfig::initial},
      {"t0", &RunConfig::t0},
      {"x0", &RunConfig::x0},
      {"y0", &RunConfig::y0},
      {"z0", &RunConfig::z0},
      {"a0", &RunConfig::a0},
      {"xdot0", &RunConfig::xdot0},
      {"zdot0", &RunConfig::zdot0},
      {"b_branch", &RunConfig::b_branch},
      {"ell0", &RunConfig::ell0},
      {"rho0", &RunConfig::rho0},
      {"Y0", &RunConfig::Y0},
      {"geometry_points", &RunConfig::geometry_points},
      {"tol_metric_inverse", &RunConfig::tol_metric_inverse},
      {"tol_christoffel", &RunConfig::tol_christoffel},
      {"tol_ricci", &RunConfig::tol_ricci},
      {"tol_einstein", &RunConfig::tol_einstein},
      {"tol_isometry", &RunConfig::tol_isometry},
      {"geodesic_kind", &RunConfig::geodesic_kind},
      {"gp_a", &RunConfig::gp_a},
      {"gp_b", &RunConfig::gp_b},
      {"gp_c", &RunConfig::gp_c},
      {"gp_Y", &RunConfig::gp_Y},
      {"gp_s0", &RunConfig::gp_s0},
      {"gp_T0", &RunConfig::gp_T0},
      {"gp_Z0", &RunConfig::gp_Z0},
      {"ray_ell", &RunConfig::ray_ell},
      {"ray_rho", &RunConfig::ray_rho},
      {"ray_Y", &RunConfig::ray_Y},
      {"span", &RunConfig::span},
      {"samples", &RunConfig::samples},
      {"t1", &RunConfig::t1},
      {"x1", &RunConfig::x1},
      {"y1", &RunConfig::y1},
      {"z1", &RunConfig::z1},
  };
  return f;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  return out;
}

template <typename I>
I parse_int(const std::string& key, const std::string& v) {
  I out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace

void set_value(RunConfig& cfg, const std::string& key, const std::string& raw) {
  std::string v = trim(raw);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
  for (const auto& [name, field] : fields()) {
    if (name != key) continue;
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(cfg.*member)>;
          if constexpr (std::is_same_v<T, double>) {
            cfg.*member = parse_double(key, v);
          } else if constexpr (std::is_same_v<T, int>) {
            cfg.*member = parse_int<int>(key, v);
          } else if constexpr (std::is_same_v<T, std::uint64_t>) {
            cfg.*member = parse_int<std::uint64_t>(key, v);
          } else if constexpr (std::is_same_v<T, bool>) {
            if (v == "true") cfg.*member = true;
            else if (v == "false") cfg.*member = false;
            else throw ConfigError("config: '" + key + "' expects true or false");
          } else {
            cfg.*member = v;
          }
        },
        field);
    return;
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

RunConfig parse_config(const std::string& text, RunConfig cfg) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos && line.find('"') == std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    set_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot read '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' must look like key=value");
  set_value(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

std::string serialize(const RunConfig& cfg) {
  std::ostringstream out;
  for (const auto& [name, field] : fields()) {
    out << name << " = ";
    std::visit(
        [&](auto member) {
          using T = std::remove_cvref_t<decltype(cfg.*member)>;
          if constexpr (std::is_same_v<T, double>) out << format_double(cfg.*member);
          else if constexpr (std::is_same_v<T, bool>) out << (cfg.*member ? "true" : "false");
          else if constexpr (std::is_same_v<T, std::string>) out << '"' << cfg.*member << '"';
          else out << cfg.*member;
        },
        field);
    out << '\n';
  }
  return out.str();
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : serialize(cfg)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void apply_environment(RunConfig& cfg) {
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') cfg.output_dir = dir;
}

void RunConfig::validate() const {
  try {
    model().validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
  if (!(ds > 0.0)) throw ConfigError("config: ds must be > 0");
  if (!(s_max > 0.0)) throw ConfigError("config: s_max must be > 0");
  if (stride < 1) throw ConfigError("config: stride must be >= 1");
  if (paths < 1) throw ConfigError("config: paths must be >= 1");
  if (threads < 0) throw ConfigError("config: threads must be >= 0");
  if (!(window_fraction > 0.0 && window_fraction <= 1.0)) throw ConfigError("config: window_fraction must lie in (0, 1]");
  if (!(abort_fraction >= 0.0 && abort_fraction <= 1.0)) throw ConfigError("config: abort_fraction must lie in [0, 1]");
  if (scheme != "splitting" && scheme != "euler") throw ConfigError("config: scheme must be splitting or euler");
  if (initial != "state" && initial != "boundary") throw ConfigError("config: initial must be state or boundary");
  if (b_branch != "lower" && b_branch != "upper") throw ConfigError("config: b_branch must be lower or upper");
  if (geodesic_kind != "timelike" && geodesic_kind != "lightlike")
    throw ConfigError("config: geodesic_kind must be timelike or lightlike");
  if (geometry_points < 1) throw ConfigError("config: geometry_points must be >= 1");
  if (samples < 2) throw ConfigError("config: samples must be >= 2");
  try {
    (void)initial_state();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid initial state: ") + e.what());
  }
}

SimulationConfig RunConfig::simulation(std::uint64_t stream) const {
  SimulationConfig sc;
  sc.s_max = s_max;
  sc.ds = ds;
  sc.stride = stride;
  sc.seed = seed;
  sc.stream = stream;
  sc.scheme = step_scheme();
  return sc;
}

StepScheme RunConfig::step_scheme() const {
  return scheme == "euler" ? StepScheme::kEulerMaruyama : StepScheme::kGeodesicSplitting;
}

ReducedState RunConfig::initial_state() const {
  const ModelParams mp = model();
  if (initial == "boundary") {
    ReducedState st = state_from_boundary_target({ell0, rho0, Y0}, a0, mp);
    st.t = t0;
    st.z = z0;
    return st;
  }
  return make_shell_state(t0, x0, y0, z0, a0, xdot0, zdot0, b_branch == "upper", mp);
}

}  // namespace godel::harness
