#include "meco/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace meco {
namespace {

struct Unit {
  const char* name;
  double scale;
};

const std::map<Quantity, std::vector<Unit>>& unit_table() {
  static const std::map<Quantity, std::vector<Unit>> table{
      {Quantity::Number, {}},
      {Quantity::Frequency, {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}}},
      {Quantity::Bits, {{"bit", 1.0}, {"bits", 1.0}, {"kbit", 1e3}, {"kbits", 1e3}, {"Mbit", 1e6}, {"Mbits", 1e6}}},
      {Quantity::Time, {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}}},
      {Quantity::Power, {{"W", 1.0}, {"mW", 1e-3}}},
      {Quantity::Energy, {{"J", 1.0}, {"mJ", 1e-3}, {"uJ", 1e-6}}},
      {Quantity::NoiseDensity, {{"dBm/Hz", 1.0}}},
      {Quantity::Distance, {{"m", 1e-3}, {"km", 1.0}}},
      {Quantity::Gain, {}},
  };
  return table;
}

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

std::string where(const YAML::Node& n, const std::string& field) {
  const auto m = n.Mark();
  std::string out = field;
  if (m.line >= 0) out = "line " + std::to_string(m.line + 1) + ", " + field;
  return out;
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& field, const std::string& msg) {
  throw ConfigError(where(n, field) + ": " + msg);
}

void check_keys(const YAML::Node& n, const std::string& field, std::initializer_list<const char*> allowed) {
  if (!n.IsMap()) fail(n, field, "expected a mapping");
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      fail(kv.first, field.empty() ? key : field + "." + key, "unknown key");
  }
}

double quantity(const YAML::Node& parent, const char* key, const std::string& field, Quantity q) {
  const YAML::Node n = parent[key];
  if (!n.IsScalar()) fail(n, field, "expected a scalar");
  try {
    return parse_quantity(n.as<std::string>(), q);
  } catch (const ConfigError& e) {
    fail(n, field, e.what());
  }
}

template <class T>
T scalar(const YAML::Node& parent, const char* key, const std::string& field) {
  const YAML::Node n = parent[key];
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, field, "cannot read '" + (n.IsScalar() ? n.Scalar() : std::string("<non-scalar>")) + "'");
  }
}

void read_system(const YAML::Node& n, SystemParams& s) {
  check_keys(n, "system",
             {"bandwidth_ul", "bandwidth_dl", "noise", "P_max", "E_max", "T_max", "kappa0", "lambda0", "a0",
              "cloudlet_freq"});
  auto get = [&](const char* key, Quantity q, double& out) {
    if (n[key]) out = quantity(n, key, std::string("system.") + key, q);
  };
  get("bandwidth_ul", Quantity::Frequency, s.W_ul);
  get("bandwidth_dl", Quantity::Frequency, s.W_dl);
  get("noise", Quantity::NoiseDensity, s.noise_density);
  get("P_max", Quantity::Power, s.P_max);
  get("E_max", Quantity::Energy, s.E_max);
  get("T_max", Quantity::Time, s.T_max);
  get("kappa0", Quantity::Number, s.kappa0);
  get("lambda0", Quantity::Number, s.lambda0);
  get("a0", Quantity::Number, s.a0);
  get("cloudlet_freq", Quantity::Frequency, s.F);
}

UserSpec read_user(const YAML::Node& n, const std::string& field) {
  check_keys(n, field, {"distance", "h_sq", "g_sq", "D_I", "rho_dl", "f_max"});
  UserSpec u;
  auto get = [&](const char* key, Quantity q, std::optional<double>& out) {
    if (n[key]) out = quantity(n, key, field + "." + key, q);
  };
  get("distance", Quantity::Distance, u.distance_km);
  get("h_sq", Quantity::Gain, u.h_sq);
  get("g_sq", Quantity::Gain, u.g_sq);
  get("D_I", Quantity::Bits, u.D_I);
  get("rho_dl", Quantity::Power, u.rho_dl);
  get("f_max", Quantity::Frequency, u.f_max);
  if (u.distance_km && (u.h_sq || u.g_sq)) fail(n, field, "give either distance or gains, not both");
  if (!u.distance_km && (u.h_sq.has_value() != u.g_sq.has_value()))
    fail(n, field, "explicit gains need both h_sq and g_sq");
  return u;
}

void read_users(const YAML::Node& n, ScenarioConfig& cfg) {
  check_keys(n, "users", {"count", "D_I", "rho_dl", "f_max", "placement", "list"});
  if (n["count"]) {
    const long c = scalar<long>(n, "count", "users.count");
    if (c < 1) fail(n["count"], "users.count", "must be at least 1");
    cfg.num_users = static_cast<std::size_t>(c);
  }
  auto& d = cfg.user_defaults;
  if (n["D_I"]) d.D_I = quantity(n, "D_I", "users.D_I", Quantity::Bits);
  if (n["rho_dl"]) d.rho_dl = quantity(n, "rho_dl", "users.rho_dl", Quantity::Power);
  if (n["f_max"]) d.f_max = quantity(n, "f_max", "users.f_max", Quantity::Frequency);
  if (const auto p = n["placement"]) {
    check_keys(p, "users.placement", {"d_min", "d_max"});
    if (p["d_min"]) cfg.d_min_km = quantity(p, "d_min", "users.placement.d_min", Quantity::Distance);
    if (p["d_max"]) cfg.d_max_km = quantity(p, "d_max", "users.placement.d_max", Quantity::Distance);
  }
  if (const auto l = n["list"]) {
    if (!l.IsSequence()) fail(l, "users.list", "expected a sequence");
    for (std::size_t i = 0; i < l.size(); ++i)
      cfg.user_list.push_back(read_user(l[i], "users.list[" + std::to_string(i) + "]"));
    if (cfg.user_list.empty()) fail(l, "users.list", "must not be empty");
    if (n["count"] && cfg.num_users != cfg.user_list.size())
      fail(n["count"], "users.count", "disagrees with the length of users.list");
    cfg.num_users = cfg.user_list.size();
  }
}

void read_sweep(const YAML::Node& n, ScenarioConfig& cfg) {
  check_keys(n, "sweep", {"variable", "from", "to", "step", "values"});
  const auto name = scalar<std::string>(n, "variable", "sweep.variable");
  Quantity q;
  if (name == "T_max") {
    cfg.sweep.variable = SweepVariable::T_max;
    q = Quantity::Time;
  } else if (name == "shared_fraction") {
    cfg.sweep.variable = SweepVariable::SharedFraction;
    q = Quantity::Number;
  } else {
    fail(n["variable"], "sweep.variable", "must be T_max or shared_fraction, got '" + name + "'");
  }
  const bool has_range = n["from"] || n["to"] || n["step"];
  if (n["values"] && has_range) fail(n, "sweep", "give either values or from/to/step");
  if (const auto v = n["values"]) {
    if (!v.IsSequence()) fail(v, "sweep.values", "expected a sequence");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto field = "sweep.values[" + std::to_string(i) + "]";
      if (!v[i].IsScalar()) fail(v[i], field, "expected a scalar");
      try {
        cfg.sweep.values.push_back(parse_quantity(v[i].as<std::string>(), q));
      } catch (const ConfigError& e) {
        fail(v[i], field, e.what());
      }
    }
  } else if (has_range) {
    for (const char* k : {"from", "to", "step"})
      if (!n[k]) fail(n, std::string("sweep.") + k, "missing");
    const double from = quantity(n, "from", "sweep.from", q);
    const double to = quantity(n, "to", "sweep.to", q);
    const double step = quantity(n, "step", "sweep.step", q);
    if (!(step > 0)) fail(n["step"], "sweep.step", "must be positive");
    if (to < from) fail(n["to"], "sweep.to", "range is empty");
    cfg.sweep.values = make_range(from, to, step);
  } else if (cfg.sweep.variable == SweepVariable::T_max) {
    cfg.sweep.values = make_range(0.01, 0.1, 0.01);
  } else {
    cfg.sweep.values = make_range(0.0, 0.9, 0.1);
  }
  if (cfg.sweep.values.empty()) fail(n, "sweep", "no sweep values");
}

void read_solver(const YAML::Node& n, SolverOptions& o) {
  check_keys(n, "solver", {"max_iters", "eps_stop", "eps_dual", "radius"});
  if (n["max_iters"]) {
    const long m = scalar<long>(n, "max_iters", "solver.max_iters");
    if (m < 0) fail(n["max_iters"], "solver.max_iters", "must be nonnegative");
    o.max_iters = static_cast<std::size_t>(m);
  }
  if (n["eps_stop"]) o.eps_stop = quantity(n, "eps_stop", "solver.eps_stop", Quantity::Number);
  if (n["eps_dual"]) o.eps_dual = quantity(n, "eps_dual", "solver.eps_dual", Quantity::Number);
  if (n["radius"]) o.radius = quantity(n, "radius", "solver.radius", Quantity::Number);
}

double round12(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  double out = v;
  std::from_chars(buf, r.ptr, out);
  return out;
}

}  // namespace

double parse_quantity(const std::string& raw, Quantity q) {
  const std::string text = trim(raw);
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto r = std::from_chars(begin, end, value);
  if (r.ec != std::errc() || !std::isfinite(value)) throw ConfigError("'" + raw + "' is not a number");
  const std::string unit = trim(std::string(r.ptr, end));
  if (unit.empty()) return value;

  if (q == Quantity::Power && unit == "dBm") return 1e-3 * std::pow(10.0, value / 10.0);
  if (q == Quantity::Gain && unit == "dB") return std::pow(10.0, value / 10.0);
  if (q == Quantity::NoiseDensity && unit == "W/Hz") {
    if (!(value > 0)) throw ConfigError("'" + raw + "': W/Hz density must be positive");
    return 10.0 * std::log10(value / 1e-3);
  }
  for (const auto& u : unit_table().at(q))
    if (unit == u.name) return value * u.scale;
  throw ConfigError("'" + raw + "': unit '" + unit + "' not valid here");
}

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::None:
      return "none";
    case SweepVariable::T_max:
      return "T_max";
    case SweepVariable::SharedFraction:
      return "shared_fraction";
  }
  return "unknown";
}

std::vector<double> make_range(double from, double to, double step) {
  std::vector<double> out;
  if (!(step > 0) || to < from) return out;
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) out.push_back(round12(from + static_cast<double>(k) * step));
  return out;
}

ScenarioConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  ScenarioConfig cfg;
  if (root.IsNull()) {
    validate_config(cfg);
    return cfg;
  }
  check_keys(root, "",
             {"system", "users", "shared_fraction", "schemes", "sweep", "solver", "equal_time_full_copy", "seed"});
  if (root["system"]) read_system(root["system"], cfg.sys);
  if (root["users"]) read_users(root["users"], cfg);
  if (root["shared_fraction"]) {
    cfg.shared_fraction = quantity(root, "shared_fraction", "shared_fraction", Quantity::Number);
    if (!(cfg.shared_fraction >= 0 && cfg.shared_fraction <= 1))
      fail(root["shared_fraction"], "shared_fraction", "must lie in [0, 1]");
  }
  if (const auto s = root["schemes"]) {
    if (!s.IsSequence()) fail(s, "schemes", "expected a sequence");
    cfg.schemes.clear();
    std::set<std::string> seen;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto name = s[i].as<std::string>();
      const auto field = "schemes[" + std::to_string(i) + "]";
      if (std::none_of(std::begin(kSchemeNames), std::end(kSchemeNames), [&](const char* k) { return name == k; }))
        fail(s[i], field, "unknown scheme '" + name + "'");
      if (!seen.insert(name).second) fail(s[i], field, "duplicate scheme '" + name + "'");
      cfg.schemes.push_back(name);
    }
    if (cfg.schemes.empty()) fail(s, "schemes", "must name at least one scheme");
  }
  if (root["sweep"]) read_sweep(root["sweep"], cfg);
  if (root["solver"]) read_solver(root["solver"], cfg.solver);
  if (root["equal_time_full_copy"])
    cfg.equal_time_full_copy = scalar<bool>(root, "equal_time_full_copy", "equal_time_full_copy");
  if (root["seed"]) cfg.seed = scalar<std::uint64_t>(root, "seed", "seed");

  validate_config(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void validate_config(const ScenarioConfig& cfg) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  const auto& s = cfg.sys;
  require(s.W_ul > 0 && s.W_dl > 0, "system: bandwidths must be positive");
  require(s.P_max > 0, "system.P_max must be positive");
  require(s.E_max >= 0, "system.E_max must be nonnegative");
  require(s.T_max > 0, "system.T_max must be positive");
  require(s.kappa0 > 0 && s.lambda0 > 0 && s.a0 > 0 && s.F > 0,
          "system: kappa0, lambda0, a0 and cloudlet_freq must be positive");
  require(cfg.num_users >= 1, "users.count must be at least 1");
  const auto& d = cfg.user_defaults;
  require(d.D_I > 0 && d.rho_dl >= 0 && d.f_max > 0, "users: D_I and f_max must be positive, rho_dl nonnegative");
  require(cfg.d_min_km > 0 && cfg.d_max_km >= cfg.d_min_km, "users.placement: need 0 < d_min <= d_max");
  for (std::size_t i = 0; i < cfg.user_list.size(); ++i) {
    const auto& u = cfg.user_list[i];
    const std::string f = "users.list[" + std::to_string(i) + "]";
    require(!u.distance_km || *u.distance_km > 0, f + ".distance must be positive");
    require(!u.h_sq || *u.h_sq > 0, f + ".h_sq must be positive");
    require(!u.g_sq || *u.g_sq > 0, f + ".g_sq must be positive");
    require(!u.D_I || *u.D_I > 0, f + ".D_I must be positive");
    require(!u.f_max || *u.f_max > 0, f + ".f_max must be positive");
    require(!u.rho_dl || *u.rho_dl >= 0, f + ".rho_dl must be nonnegative");
  }
  require(cfg.shared_fraction >= 0 && cfg.shared_fraction <= 1, "shared_fraction must lie in [0, 1]");
  require(!cfg.schemes.empty(), "schemes must name at least one scheme");
  if (cfg.sweep.variable != SweepVariable::None) {
    require(!cfg.sweep.values.empty(), "sweep range is empty");
    for (double v : cfg.sweep.values) {
      if (cfg.sweep.variable == SweepVariable::T_max)
        require(v > 0, "sweep: T_max values must be positive");
      else
        require(v >= 0 && v <= 1, "sweep: shared_fraction values must lie in [0, 1]");
    }
  }
  require(cfg.solver.eps_stop > 0 && cfg.solver.eps_dual > 0 && cfg.solver.radius > 0,
          "solver: eps_stop, eps_dual and radius must be positive");
}

Scenario build_scenario(const ScenarioConfig& cfg) {
  Scenario sc;
  sc.sys = cfg.sys;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> dist(cfg.d_min_km, cfg.d_max_km);
  for (std::size_t u = 0; u < cfg.num_users; ++u) {
    UserParams p = cfg.user_defaults;
    const UserSpec spec = u < cfg.user_list.size() ? cfg.user_list[u] : UserSpec{};
    if (spec.h_sq) {
      p.h_sq = *spec.h_sq;
      p.g_sq = *spec.g_sq;
      p.distance_km = 0.0;
    } else {
      p.distance_km = spec.distance_km ? *spec.distance_km : dist(rng);
      p.h_sq = p.g_sq = pathloss_gain(p.distance_km);
    }
    if (spec.D_I) p.D_I = *spec.D_I;
    if (spec.rho_dl) p.rho_dl = *spec.rho_dl;
    if (spec.f_max) p.f_max = *spec.f_max;
    sc.users.push_back(p);
  }
  double d_min = sc.users.front().D_I;
  for (const auto& p : sc.users) d_min = std::min(d_min, p.D_I);
  sc.D_S = cfg.shared_fraction * d_min;
  return sc;
}

Scenario build_scenario(const ScenarioConfig& cfg, double sweep_value) {
  ScenarioConfig c = cfg;
  switch (cfg.sweep.variable) {
    case SweepVariable::T_max:
      c.sys.T_max = sweep_value;
      break;
    case SweepVariable::SharedFraction:
      c.shared_fraction = sweep_value;
      break;
    case SweepVariable::None:
      break;
  }
  return build_scenario(c);
}

BaselineOptions baseline_options(const ScenarioConfig& cfg) {
  BaselineOptions o;
  o.solver = cfg.solver;
  o.solver.record_trace = false;
  o.equal_time_full_copy = cfg.equal_time_full_copy;
  return o;
}

}  // namespace meco
