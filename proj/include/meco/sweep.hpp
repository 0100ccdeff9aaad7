#pragma once

// Experiment sweeps: one row per (sweep point, scheme).

#include <string>
#include <vector>

#include "meco/config.hpp"

namespace meco {

struct SweepRow {
  std::string sweep_variable;  // "T_max", "shared_fraction" or "none"
  double sweep_value = 0.0;
  std::string scheme;
  std::string status;          // optimal, max_iters, infeasible or error
  bool reference_only = false; // local_only rows: kept in the data, left out of plots
  double total_energy_J = kInfeasibleEnergy;
  std::vector<double> user_energies_J;
  double rel_gap = 0.0;
  std::size_t iterations = 0;
  double wall_time_s = 0.0;
  std::string message;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepOptions {
  bool timing = false;    // record wall_time_s; left at 0 otherwise so output is reproducible
  bool parallel = true;   // false: evaluate points in order on one thread
  double feasibility_tol = 1e-6;
};

// Result of one scheme on one scenario.
SweepRow run_scheme(const std::string& scheme, const Scenario& sc, const BaselineOptions& opts,
                    double feasibility_tol = 1e-6);

// Runs every requested scheme at every sweep value (the base scenario alone
// when the config has no sweep). Rows are ordered by sweep value, then scheme
// name. A point that throws is recorded with status "error".
std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const SweepOptions& opts = {});

}  // namespace meco
