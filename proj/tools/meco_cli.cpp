// meco: solve, sweep and cross-check offloading scenarios.
//
//   meco solve  <config.yaml>                 report for the base scenario
//   meco sweep  <config.yaml> --out rows.csv  every scheme at every sweep point
//   meco verify <config.yaml>                 oracle cross-checks, at most 3 users
//
// Exit status: 0 success, 2 scenario infeasible, 1 any other error (including
// a failed verify check).

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "meco/config.hpp"
#include "meco/csv.hpp"
#include "meco/oracle.hpp"
#include "meco/sweep.hpp"

using namespace meco;

namespace {

constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::size_t> max_iters;

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "RNG seed for user placement");
    cmd->add_option("--tol", tol, "relative dual stopping tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iters", max_iters, "ellipsoid iteration limit (0: automatic)");
  }
  void apply(ScenarioConfig& cfg) const {
    if (seed) cfg.seed = *seed;
    if (tol) cfg.solver.eps_stop = *tol;
    if (max_iters) cfg.solver.max_iters = *max_iters;
    validate_config(cfg);
  }
};

void print_scenario(const Scenario& sc) {
  std::printf("users %zu  T_max %g s  D_S %g bits  E_max %g J  P_max %g W\n", sc.num_users(), sc.sys.T_max,
              sc.D_S, sc.sys.E_max, sc.sys.P_max);
}

void print_allocation(const Scenario& sc, const Allocation& a) {
  const auto e = user_energies(sc, a);
  std::printf("%4s %11s %12s %12s %12s %12s %12s %12s\n", "user", "dist_km", "D_L", "D_S_split", "t_ul_S",
              "t_ul", "t_dl", "energy_J");
  for (std::size_t u = 0; u < sc.num_users(); ++u)
    std::printf("%4zu %11.4g %12.6g %12.6g %12.6g %12.6g %12.6g %12.6g\n", u, sc.users[u].distance_km, a.D_L[u],
                a.D_S_split[u], a.t_ul_shared[u], a.t_ul_ind[u], a.t_dl_ind[u], e[u]);
  std::printf("t_dl window %.6g s\n", a.t_dl_aux);
}

int cmd_solve(const std::string& path, const Overrides& ov) {
  ScenarioConfig cfg = load_config(path);
  ov.apply(cfg);
  const Scenario sc = build_scenario(cfg);
  print_scenario(sc);
  SolverOptions so = cfg.solver;
  so.record_trace = false;
  const SolveReport r = solve(sc, so);
  std::printf("status %s\n", to_string(r.status).c_str());
  if (r.status == SolveStatus::Infeasible) {
    std::printf("%s\n", r.message.c_str());
    return kExitInfeasible;
  }
  std::printf("energy %.10g J  dual bound %.10g J  rel_gap %.3g  iterations %zu\n", r.primal_value, r.dual_value,
              r.rel_gap, r.iterations);
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [k, v] : r.kkt_residuals)
    if (v >= worst) worst = v, worst_name = k;
  std::printf("largest KKT residual %.3g (%s)\n", worst, worst_name.c_str());
  print_allocation(sc, r.allocation);
  if (!r.message.empty()) std::printf("%s\n", r.message.c_str());

  const BaselineOptions bo = baseline_options(cfg);
  for (const auto& scheme : cfg.schemes) {
    if (scheme == "proposed") continue;
    const SweepRow row = run_scheme(scheme, sc, bo);
    std::printf("%-13s %-10s %.10g J%s\n", scheme.c_str(), row.status.c_str(), row.total_energy_J,
                row.message.empty() ? "" : ("  " + row.message).c_str());
  }
  return 0;
}

int cmd_sweep(const std::string& path, const std::string& out, bool timing, bool serial, const Overrides& ov) {
  ScenarioConfig cfg = load_config(path);
  ov.apply(cfg);
  SweepOptions so;
  so.timing = timing;
  so.parallel = !serial;
  const auto rows = run_sweep(cfg, so);
  if (out.empty() || out == "-") {
    write_csv(std::cout, rows);
  } else {
    emit_csv(rows, out);
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.status == "error" || r.status == "infeasible";
    std::fprintf(stderr, "%zu rows written to %s (%zu infeasible or failed)\n", rows.size(), out.c_str(), failed);
  }
  return 0;
}

int cmd_verify(const std::string& path, std::vector<std::size_t> grids, const Overrides& ov) {
  ScenarioConfig cfg = load_config(path);
  ov.apply(cfg);
  const Scenario sc = build_scenario(cfg);
  if (sc.num_users() > kMaxOracleUsers)
    throw std::invalid_argument("verify supports at most " + std::to_string(kMaxOracleUsers) + " users");
  if (grids.empty()) grids = sc.num_users() <= 2 ? std::vector<std::size_t>{4, 8, 16} : std::vector<std::size_t>{2, 4, 8};
  std::sort(grids.begin(), grids.end());
  print_scenario(sc);

  SolverOptions so = cfg.solver;
  so.record_trace = false;
  const SolveReport r = solve(sc, so);
  if (r.status == SolveStatus::Infeasible) {
    std::printf("solver: infeasible (%s)\n", r.message.c_str());
    return kExitInfeasible;
  }
  std::printf("solver: %.10g J, dual bound %.10g J\n", r.primal_value, r.dual_value);
  bool ok = true;
  auto check = [&](bool pass, const std::string& what) {
    std::printf("%s  %s\n", pass ? "PASS" : "FAIL", what.c_str());
    ok = ok && pass;
  };
  std::ostringstream m;
  m << "solver converged (" << to_string(r.status) << ", rel_gap " << r.rel_gap << ")";
  check(r.status == SolveStatus::Optimal, m.str());
  check(check_feasible(sc, r.allocation, 1e-6).empty(), "solver allocation feasible at 1e-6");

  if (sc.D_S > 0 && sc.num_users() > 1) {
    const auto vertex = lp_split_oracle(r.shared_delta, sc.D_S);
    const auto carrier = static_cast<std::size_t>(
        std::max_element(r.allocation.D_S_split.begin(), r.allocation.D_S_split.end()) -
        r.allocation.D_S_split.begin());
    const auto lp = static_cast<std::size_t>(std::max_element(vertex.begin(), vertex.end()) - vertex.begin());
    check(carrier == lp, "shared carrier " + std::to_string(carrier) + " matches LP oracle vertex " +
                             std::to_string(lp));
  }

  const double tol = 1e-9 * r.primal_value;
  std::vector<double> values;
  Allocation finest;
  for (std::size_t res : grids) {
    const auto g = grid_solve(sc, res);
    values.push_back(g.best_value);
    finest = g.best_allocation;
    std::printf("grid %3zu: %.10g J (%zu points)\n", res, g.best_value, g.iterations);
    check(r.dual_value <= g.best_value + tol, "dual bound below grid value at resolution " + std::to_string(res));
  }
  for (std::size_t k = 1; k < values.size(); ++k)
    check(values[k] <= values[k - 1] + tol, "grid value nonincreasing from resolution " +
                                                 std::to_string(grids[k - 1]) + " to " + std::to_string(grids[k]));
  if (!values.empty()) {
    const double slack = values.size() > 1 ? values[values.size() - 2] - values.back() : 0.0;
    check(r.primal_value <= values.back() + slack + tol, "solver energy within one refinement of the finest grid");
  }

  // Seeded at the best grid point: its times are already exact for its bits,
  // so the descent only has to move the bit variables.
  ProjectedGradientOptions pg_opts;
  pg_opts.start = finest;
  const auto pg = projected_gradient_solve(sc, pg_opts);
  std::printf("projected gradient from the finest grid point: %.10g J after %zu steps\n", pg.best_value,
              pg.iterations);
  check(pg.best_value >= r.dual_value - tol, "projected gradient value above dual bound");
  check(check_feasible(sc, pg.best_allocation, 1e-6).empty(), "projected gradient allocation feasible at 1e-6");
  check(std::abs(pg.best_value - r.primal_value) <= 1e-3 * r.primal_value,
        "projected gradient within 1e-3 of solver energy");
  if (!values.empty())
    check(pg.best_value <= values.back() * (1 + 1e-3), "projected gradient within 1e-3 of the finest grid or below");
  return ok ? 0 : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-optimal offloading with shared input data"};
  app.require_subcommand(1);

  std::string path, out;
  bool timing = false, serial = false;
  std::vector<std::size_t> grids;
  Overrides ov;

  auto* solve_cmd = app.add_subcommand("solve", "solve the base scenario and print the allocation");
  solve_cmd->add_option("config", path, "YAML scenario file")->required()->check(CLI::ExistingFile);
  ov.attach(solve_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "run every scheme over the sweep and write CSV");
  sweep_cmd->add_option("config", path, "YAML scenario file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", out, "CSV output path ('-' or omitted: stdout)");
  sweep_cmd->add_flag("--timing", timing, "record wall-clock time per row (output no longer reproducible)");
  sweep_cmd->add_flag("--serial", serial, "evaluate sweep points on one thread");
  ov.attach(sweep_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "cross-check the solver against brute-force oracles");
  verify_cmd->add_option("config", path, "YAML scenario file")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--grid", grids, "grid resolutions (default 4 8 16, or 2 4 8 for three users)");
  ov.attach(verify_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*solve_cmd) return cmd_solve(path, ov);
    if (*sweep_cmd) return cmd_sweep(path, out, timing, serial, ov);
    if (*verify_cmd) return cmd_verify(path, grids, ov);
  } catch (const InfeasibleScenario& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
