#pragma once

// Scenario and experiment description read from a YAML file.
//
// Every physical value is a scalar with an optional unit suffix; a bare number
// is taken in SI. Recognised suffixes:
//   frequency  Hz kHz MHz GHz
//   data       bit bits kbit kbits Mbit Mbits
//   time       s ms us
//   power      W mW dBm
//   energy     J mJ uJ
//   noise      dBm/Hz W/Hz
//   distance   m km
//   gain       dB (or a bare linear value)
//
//   system:
//     bandwidth_ul: 10MHz      bandwidth_dl: 10MHz
//     noise: -169dBm/Hz        P_max: 1W        E_max: 1mJ
//     T_max: 10ms              kappa0: 1e-26    lambda0: 1e3   # cycles/bit
//     a0: 1                    cloudlet_freq: 10GHz
//   users:
//     count: 10
//     D_I: 10kbits             rho_dl: 0.625W   f_max: 1GHz
//     placement: {d_min: 50m, d_max: 0.5km}    # seeded uniform draw
//     list:                                    # optional, overrides count
//       - {distance: 0.2km}
//       - {h_sq: -120dB, g_sq: -120dB, D_I: 20kbits}
//   shared_fraction: 0.3       # D_S = fraction * min_u D_I
//   schemes: [proposed, local_only, no_shared, full_offload, equal_time]
//   sweep: {variable: T_max, from: 10ms, to: 100ms, step: 10ms}
//          # or {variable: shared_fraction, values: [0, 0.5, 0.9]}
//   solver: {max_iters: 0, eps_stop: 1e-9, eps_dual: 1e-12, radius: 1e4}
//   equal_time_full_copy: false
//   seed: 1
//
// Unknown keys are rejected.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "meco/baselines.hpp"
#include "meco/dual_solver.hpp"
#include "meco/model.hpp"

namespace meco {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Quantity { Number, Frequency, Bits, Time, Power, Energy, NoiseDensity, Distance, Gain };

// "10MHz" -> 1e7. Throws ConfigError naming the offending text.
double parse_quantity(const std::string& text, Quantity q);

enum class SweepVariable { None, T_max, SharedFraction };
std::string to_string(SweepVariable v);

struct SweepSpec {
  SweepVariable variable = SweepVariable::None;
  std::vector<double> values;  // SI (seconds for T_max)
};

// One entry of users.list. Unset fields fall back to the users block.
struct UserSpec {
  std::optional<double> distance_km;
  std::optional<double> h_sq, g_sq;
  std::optional<double> D_I, rho_dl, f_max;
};

struct ScenarioConfig {
  SystemParams sys;
  std::size_t num_users = 10;
  UserParams user_defaults;
  double d_min_km = 0.05;
  double d_max_km = 0.5;
  std::vector<UserSpec> user_list;
  double shared_fraction = 0.3;
  std::vector<std::string> schemes{"proposed", "local_only", "no_shared", "full_offload", "equal_time"};
  SweepSpec sweep;
  SolverOptions solver;
  bool equal_time_full_copy = false;
  std::uint64_t seed = 1;
};

inline constexpr const char* kSchemeNames[] = {"proposed", "local_only", "no_shared", "full_offload",
                                               "equal_time"};

// Evenly spaced from..to (inclusive, within 1e-9 of a step), values rounded to
// 12 significant digits so 0.1 + 2*0.1 prints as 0.3.
std::vector<double> make_range(double from, double to, double step);

ScenarioConfig parse_config(const std::string& yaml_text);
ScenarioConfig load_config(const std::string& path);

// Throws ConfigError on the first violated invariant.
void validate_config(const ScenarioConfig& cfg);

// Scenario for the base settings, or with the sweep variable set to `value`.
// Distances are drawn from the seed once per call, in user order, so every
// sweep point sees the same placement.
Scenario build_scenario(const ScenarioConfig& cfg);
Scenario build_scenario(const ScenarioConfig& cfg, double sweep_value);

BaselineOptions baseline_options(const ScenarioConfig& cfg);

}  // namespace meco
