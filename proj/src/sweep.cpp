#include "meco/sweep.hpp"

#include <algorithm>
#include <chrono>

namespace meco {
namespace {

BaselineKind baseline_kind(const std::string& scheme) {
  if (scheme == "local_only") return BaselineKind::LocalOnly;
  if (scheme == "no_shared") return BaselineKind::NoSharedAwareness;
  if (scheme == "full_offload") return BaselineKind::FullOffloadOnly;
  if (scheme == "equal_time") return BaselineKind::EqualTime;
  throw std::invalid_argument("unknown scheme '" + scheme + "'");
}

void fill_energies(SweepRow& row, const Scenario& accounting, const Allocation& a, double tol) {
  row.user_energies_J = user_energies(accounting, a);
  row.total_energy_J = 0.0;
  for (double e : row.user_energies_J) row.total_energy_J += e;
  const auto v = check_feasible(accounting, a, tol);
  if (!v.empty()) {
    row.status = "error";
    row.message = "allocation violates " + v.front().name;
    if (v.front().user != kAllUsers) row.message += " (user " + std::to_string(v.front().user) + ")";
  }
}

}  // namespace

SweepRow run_scheme(const std::string& scheme, const Scenario& sc, const BaselineOptions& opts,
                    double feasibility_tol) {
  SweepRow row;
  row.scheme = scheme;
  row.reference_only = scheme == "local_only";
  try {
    if (scheme == "proposed") {
      const SolveReport r = solve(sc, opts.solver);
      row.status = to_string(r.status);
      row.iterations = r.iterations;
      row.message = r.message;
      if (r.status != SolveStatus::Infeasible) {
        row.rel_gap = r.rel_gap;
        fill_energies(row, sc, r.allocation, feasibility_tol);
      }
    } else {
      const BaselineResult r = run_baseline(baseline_kind(scheme), sc, opts);
      row.status = to_string(r.status);
      row.iterations = r.iterations;
      row.message = r.message;
      if (r.status != SolveStatus::Infeasible) {
        row.rel_gap = r.rel_gap;
        fill_energies(row, r.accounting, r.allocation, feasibility_tol);
      }
    }
  } catch (const std::exception& e) {
    row.status = "error";
    row.message = e.what();
    row.total_energy_J = kInfeasibleEnergy;
    row.user_energies_J.clear();
  }
  return row;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const SweepOptions& opts) {
  validate_config(cfg);
  std::vector<double> values = cfg.sweep.values;
  if (cfg.sweep.variable == SweepVariable::None) values = {cfg.sys.T_max};
  std::vector<std::string> schemes = cfg.schemes;
  std::sort(schemes.begin(), schemes.end());
  const BaselineOptions base = baseline_options(cfg);
  const std::string variable = to_string(cfg.sweep.variable);

  const std::size_t n = values.size() * schemes.size();
  std::vector<SweepRow> rows(n);
  auto run = [&](std::size_t k) {
    const double value = values[k / schemes.size()];
    const std::string& scheme = schemes[k % schemes.size()];
    const auto t0 = std::chrono::steady_clock::now();
    SweepRow row;
    try {
      row = run_scheme(scheme, build_scenario(cfg, value), base, opts.feasibility_tol);
    } catch (const std::exception& e) {
      row.scheme = scheme;
      row.status = "error";
      row.message = e.what();
    }
    row.sweep_variable = variable;
    row.sweep_value = value;
    if (opts.timing) row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rows[k] = std::move(row);
  };

  if (opts.parallel) {
    const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long k = 0; k < count; ++k) run(static_cast<std::size_t>(k));
  } else {
    for (std::size_t k = 0; k < n; ++k) run(k);
  }

  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
    return a.scheme < b.scheme;
  });
  return rows;
}

}  // namespace meco
