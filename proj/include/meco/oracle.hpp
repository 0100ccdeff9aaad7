#pragma once

// Small-instance reference solvers used to certify the dual solver. Nothing in
// here calls the Lambert-W routines or the dual machinery: rates come from
// Newton/bisection on the stationarity conditions directly.

#include <cstddef>
#include <span>
#include <vector>

#include "meco/model.hpp"

namespace meco {

enum class OracleMethod { GridSearch, ProjectedGradient };

struct OracleResult {
  double best_value = kInfeasibleEnergy;
  Allocation best_allocation;
  std::vector<std::size_t> grid_resolution;  // points per dimension; empty for gradient runs
  OracleMethod method = OracleMethod::GridSearch;
  std::size_t iterations = 0;  // grid points evaluated or gradient steps taken
};

inline constexpr std::size_t kMaxOracleUsers = 3;

// Exact time allocation for fixed bits: per-user uplink payload `up` (shared
// plus individual) and download payload `down` in output bits. Returns the
// minimal energy and fills the times of `a` (D_L and D_S_split untouched);
// +inf when no times satisfy the constraints.
double optimal_time_energy(const Scenario& sc, std::span<const double> up, std::span<const double> down,
                           Allocation* a = nullptr);

// Exhaustive search over local shares (resolution + 1 points each on
// [0, max_local_bits]) and shared splits (simplex grid of step D_S/resolution),
// times from optimal_time_energy. Grid points are evaluated in parallel; the
// reduction is min by value, ties by lowest flat grid index.
OracleResult grid_solve(const Scenario& sc, std::size_t resolution);

// Same search, single-threaded. Kept as the reference for grid_solve.
OracleResult grid_solve_reference(const Scenario& sc, std::size_t resolution);

// Partial derivatives of total_energy, laid out like the allocation itself:
// every field holds d E_total / d (that field). t_dl_aux does not enter the
// energy and gets 0. Requires positive slot lengths wherever bits are sent.
Allocation energy_gradient(const Scenario& sc, const Allocation& a);

struct ProjectedGradientOptions {
  std::size_t max_iters = 40;
  double initial_step = 0.1;       // first trial step, in units of 1/|grad|_inf
  double backtrack = 0.5;          // step shrink on a rejected trial
  double grow = 1.25;              // step growth after an accepted trial
  double armijo = 1e-4;
  double tol = 1e-12;              // stop when a step moves x by less than this (scaled)
  double f_tol = 1e-6;             // stop when `window` steps gain less than f_tol relative
  std::size_t window = 5;
  double projection_tol = 1e-9;
  std::size_t max_projection_cycles = 20000;
  Allocation start;  // projected and used when sized for the scenario; else an interior point
};

// Euclidean projection (times / T_max, bits / max D_I) of `a` onto the
// reduced feasible set with t_local = T_max, by Dykstra's alternating
// projections.
Allocation project_feasible(const Scenario& sc, const Allocation& a, double tol = 1e-9,
                            std::size_t max_cycles = 20000);

// Projected gradient descent with backtracking, from opts.start or an
// interior point.
// Throws InfeasibleScenario-like DomainError when no strictly feasible start
// is found.
OracleResult projected_gradient_solve(const Scenario& sc, const ProjectedGradientOptions& opts = {});

// Minimiser of sum_u delta_u x_u over the simplex {x >= 0, sum x = D_S} on a
// grid of step D_S/steps; ties go to the lexicographically first grid point.
std::vector<double> lp_split_oracle(std::span<const double> delta, double D_S, std::size_t steps = 100);

}  // namespace meco
