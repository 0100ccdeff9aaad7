#pragma once

// Comparison schemes. Each returns the allocation together with the scenario
// under whose accounting its energy is measured: schemes that ignore the
// shared data are evaluated on a copy of the scenario with D_S folded into the
// individual data.

#include <string>

#include "meco/dual_solver.hpp"
#include "meco/model.hpp"

namespace meco {

enum class BaselineKind { LocalOnly, NoSharedAwareness, FullOffloadOnly, EqualTime };

std::string to_string(BaselineKind k);

struct BaselineResult {
  BaselineKind kind = BaselineKind::LocalOnly;
  SolveStatus status = SolveStatus::Infeasible;
  Allocation allocation;
  Scenario accounting;  // scenario the allocation and energies refer to
  double energy = kInfeasibleEnergy;
  double rel_gap = 0.0;  // dual-solver based schemes only
  std::size_t iterations = 0;
  std::string message;
};

struct BaselineOptions {
  SolverOptions solver;
  // Equal-time scheme: every user uploads the whole shared block instead of
  // an equal 1/U share.
  bool equal_time_full_copy = false;
};

// Everything computed on the device for the full T_max.
BaselineResult local_only(const Scenario& sc);

// Solves the scenario with D_S := 0 and D_I unchanged: every user uploads its
// own copy of the shared bits and receives the results individually.
BaselineResult no_shared_awareness(const Scenario& sc, const SolverOptions& opts = {});

// Dual solver with D_L pinned to zero; shared-data coordination retained.
BaselineResult full_offload_only(const Scenario& sc, const SolverOptions& opts = {});

// Common t_{u,S}^ul, t_u^ul and t_u^dl across users, shared bits split
// equally. Nested search: golden section over the download window and the
// shared/individual uplink split, per-user local share by bisection on its
// stationarity condition, BS budget by bisection on its multiplier.
BaselineResult equal_time(const Scenario& sc, bool full_copy = false);

BaselineResult run_baseline(BaselineKind kind, const Scenario& sc, const BaselineOptions& opts = {});

}  // namespace meco
