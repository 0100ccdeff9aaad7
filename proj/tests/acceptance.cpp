// Acceptance suite. `acceptance` runs all ten criteria; `acceptance 3 7` runs
// a subset. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "meco/baselines.hpp"
#include "meco/config.hpp"
#include "meco/csv.hpp"
#include "meco/dual_solver.hpp"
#include "meco/lambertw.hpp"
#include "meco/oracle.hpp"
#include "meco/sweep.hpp"
#include "support.hpp"

using namespace meco;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome local_only_analytic() {
  Outcome o;
  for (auto [T, expect] : {std::pair{0.01, 1.0}, std::pair{0.1, 0.01}}) {
    Scenario sc;
    sc.sys.T_max = T;
    sc.users.resize(10);
    const auto r = local_only(sc);
    const double rel = std::abs(r.energy - expect) / expect;
    o.pass = o.pass && r.status == SolveStatus::Optimal && rel <= 1e-12;
    o.detail += fmt("T=%g: ", T) + fmt("%.17g J ", r.energy) + fmt("(rel err %.1e) ", rel);
  }
  return o;
}

Outcome lambert_identity() {
  const double branch = -std::exp(-1.0);
  const int n = 100000;
  const double hi = std::log10(1e8 - branch);
  double worst = 0.0, worst_x = branch;
  for (int k = 0; k < n; ++k) {
    // offsets from the branch point, log-spaced from 1e-17 up to the top of the range
    const double x = k == 0 ? branch : branch + std::pow(10.0, -17.0 + (hi + 17.0) * k / (n - 1));
    const double w = lambert_w0(x);
    const double err = std::abs(w * std::exp(w) - x) / std::max(1.0, std::abs(x));
    if (err > worst) worst = err, worst_x = x;
  }
  return {worst <= 1e-13, std::to_string(n) + " points, worst |W e^W - x|/max(1,|x|) = " + fmt("%.2e", worst) +
                              fmt(" at x = %.17g", worst_x)};
}

Outcome inverse_identity() {
  std::mt19937_64 rng(3);
  const double W = 1e6, N0 = 1.2589254117941673e-14;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double r = testing::log_uniform(rng, 1e-3 * W, 30.0 * W);
    const double z = r / W * std::log(2.0);
    const double y = N0 * (std::expm1(z) - z * std::exp(z));  // f(r) - r f'(r)
    const double back = invert_power_tradeoff(y, N0, W);
    worst = std::max(worst, std::abs(back - r) / r);
  }
  return {worst <= 1e-9, fmt("1000 rates in [1e3, 3e7] bit/s, worst relative error %.2e", worst)};
}

Outcome winner_take_all() {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> users(2, 5);
  int single = 0, lp_checked = 0, lp_match = 0, with_shared = 0;
  std::string first_bad;
  for (int k = 0; k < 100; ++k) {
    Scenario sc = testing::random_scenario(rng, users(rng));
    if (sc.D_S <= 0) sc.D_S = 1e3;
    ++with_shared;
    SolverOptions so;
    so.record_trace = false;
    const auto r = solve(sc, so);
    std::size_t carriers = 0, carrier = 0;
    for (std::size_t u = 0; u < sc.num_users(); ++u)
      if (r.allocation.D_S_split[u] > 0) ++carriers, carrier = u;
    const bool one = r.status == SolveStatus::Optimal && carriers == 1 &&
                     std::abs(r.allocation.D_S_split[carrier] - sc.D_S) <= 1e-12 * sc.D_S;
    single += one;
    if (!one && first_bad.empty()) first_bad = " first failure at instance " + std::to_string(k);
    if (sc.num_users() <= kMaxOracleUsers) {
      ++lp_checked;
      const auto v = lp_split_oracle(r.shared_delta, sc.D_S, 100);
      const auto lp = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
      lp_match += one && lp == carrier && std::abs(v[lp] - sc.D_S) <= 1e-12 * sc.D_S;
    }
  }
  return {single == with_shared && lp_match == lp_checked,
          std::to_string(single) + "/" + std::to_string(with_shared) + " single carrier, " +
              std::to_string(lp_match) + "/" + std::to_string(lp_checked) + " match the LP vertex (U<=3)" +
              first_bad};
}

Outcome duality_gap() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> users(2, 10);
  double worst_gap = 0.0, worst_kkt = 0.0;
  std::string worst_name;
  int ok = 0;
  for (int k = 0; k < 50; ++k) {
    const Scenario sc = testing::random_scenario(rng, users(rng));
    SolverOptions so;
    so.record_trace = false;
    const auto r = solve(sc, so);
    double kkt = 0.0;
    std::string name;
    for (const auto& [key, v] : r.kkt_residuals)
      if (v >= kkt) kkt = v, name = key;
    worst_gap = std::max(worst_gap, r.rel_gap);
    if (kkt > worst_kkt) worst_kkt = kkt, worst_name = name;
    ok += r.status == SolveStatus::Optimal && r.rel_gap <= 1e-3 && kkt <= 1e-6 &&
          check_feasible(sc, r.allocation, 1e-6).empty();
  }
  return {ok == 50, std::to_string(ok) + "/50 certified; worst rel_gap " + fmt("%.2e", worst_gap) +
                        ", worst KKT residual " + fmt("%.2e", worst_kkt) + " (" + worst_name + ")"};
}

Outcome oracle_sandwich() {
  std::mt19937_64 rng(6);
  int ok = 0, strict = 0;
  std::string first_bad;
  double worst_excess = -1.0;
  for (int k = 0; k < 20; ++k) {
    const Scenario sc = testing::random_scenario(rng, k % 4 == 0 ? 1 : 2);
    SolverOptions so;
    so.record_trace = false;
    const auto r = solve(sc, so);
    const double tol = 1e-9 * r.primal_value;
    std::vector<double> grid;
    for (std::size_t res : {4, 8, 16}) grid.push_back(grid_solve(sc, res).best_value);
    const bool below = std::all_of(grid.begin(), grid.end(), [&](double g) { return r.dual_value <= g + tol; });
    const bool monotone = grid[1] <= grid[0] + tol && grid[2] <= grid[1] + tol;
    const double slack = grid[1] - grid[2];
    const bool primal = r.primal_value <= grid[2] + slack + tol;
    worst_excess = std::max(worst_excess, (r.primal_value - grid[2]) / r.primal_value);
    strict += grid[2] < grid[0];
    const bool pass = r.status == SolveStatus::Optimal && below && monotone && primal;
    ok += pass;
    if (!pass && first_bad.empty())
      first_bad = "; instance " + std::to_string(k) + ": dual " + fmt("%.9e", r.dual_value) + " primal " +
                  fmt("%.9e", r.primal_value) + " grid " + fmt("%.9e", grid[0]) + fmt("/%.9e", grid[1]) +
                  fmt("/%.9e", grid[2]);
  }
  return {ok == 20, std::to_string(ok) + "/20 sandwiched with nonincreasing grid gaps (" + std::to_string(strict) +
                        " strictly smaller at 16 than at 4); max (primal - grid16)/primal " +
                        fmt("%.2e", worst_excess) + first_bad};
}

std::map<std::string, std::vector<double>> by_scheme(const std::vector<SweepRow>& rows) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& r : rows) out[r.scheme].push_back(r.status == "optimal" ? r.total_energy_J : NAN);
  return out;
}

bool leq(double a, double b) { return a <= b * (1 + 1e-9); }

Outcome latency_sweep() {
  const auto cfg = parse_config("sweep: {variable: T_max}\n");
  const auto rows = run_sweep(cfg);
  auto e = by_scheme(rows);
  const auto& p = e["proposed"];
  bool dec = true, vs_et = true, vs_fo = true, vs_ns = true;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k > 0) dec = dec && p[k] < p[k - 1];
    vs_et = vs_et && leq(p[k], e["equal_time"][k]);
    vs_fo = vs_fo && leq(p[k], e["full_offload"][k]);
    vs_ns = vs_ns && leq(p[k], e["no_shared"][k]);
  }
  std::string d = std::to_string(p.size()) + " points, proposed " + fmt("%.4e", p.front()) + fmt(" -> %.4e J", p.back());
  d += std::string("; strictly decreasing ") + (dec ? "yes" : "no") + ", <= equal_time " + (vs_et ? "yes" : "no") +
       ", <= full_offload " + (vs_fo ? "yes" : "no") + ", <= no_shared " + (vs_ns ? "yes" : "no");
  return {p.size() == 10 && dec && vs_et && vs_fo && vs_ns, d};
}

Outcome shared_sweep() {
  const auto cfg = parse_config("sweep: {variable: shared_fraction}\n");
  const auto rows = run_sweep(cfg);
  auto e = by_scheme(rows);
  const auto &p = e["proposed"], &f = e["full_offload"], &n = e["no_shared"];
  bool p_dec = true, f_dec = true;
  for (std::size_t k = 1; k < p.size(); ++k) {
    p_dec = p_dec && leq(p[k], p[k - 1]);
    f_dec = f_dec && leq(f[k], f[k - 1]);
  }
  const double ratio = f.back() / p.back();
  const auto [lo, hi] = std::minmax_element(n.begin(), n.end());
  const double spread = (*hi - *lo) / *lo;
  std::string d = "proposed " + fmt("%.4e", p.front()) + fmt(" -> %.4e", p.back()) + ", full_offload " +
                  fmt("%.4e", f.front()) + fmt(" -> %.4e", f.back()) + fmt("; full_offload/proposed at 0.9 = %.4f", ratio) +
                  fmt("; no_shared spread %.1e", spread);
  return {p.size() == 10 && p_dec && f_dec && ratio <= 1.05 && spread <= 1e-9, d};
}

Outcome gradient_check() {
  // E_total sums terms up to 1e8 times larger than some partials, so the
  // central differences are taken in 50-digit arithmetic on a term-by-term
  // evaluator that is itself checked against total_energy.
  using Big = boost::multiprecision::cpp_bin_float_50;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.1, 0.9);
  double worst = 0.0, worst_eval = 0.0;
  std::string where;
  const char* names[] = {"t_ul_shared", "t_ul_ind", "t_dl_ind", "t_local", "D_L", "D_S_split"};
  for (int k = 0; k < 100; ++k) {
    const Scenario sc = testing::random_scenario(rng, 1 + k % 3);
    const std::size_t n = sc.num_users();
    const double T = sc.sys.T_max;
    Allocation a(n);
    double sum = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      a.t_ul_shared[u] = unit(rng) * T / 3;
      a.t_ul_ind[u] = unit(rng) * T / 3;
      a.t_dl_ind[u] = unit(rng) * T / 3;
      a.t_local[u] = (0.5 + unit(rng)) * T;
      a.D_L[u] = unit(rng) * (sc.users[u].D_I - sc.D_S);
      a.D_S_split[u] = unit(rng);
      sum += a.D_S_split[u];
    }
    for (auto& s : a.D_S_split) s *= sc.D_S / sum;
    const double e = total_energy(sc, a);
    worst_eval = std::max(worst_eval, std::abs(testing::total_energy_as<double>(sc, a) - e) / e);
    const Allocation g = energy_gradient(sc, a);
    const std::vector<double>* exact[] = {&g.t_ul_shared, &g.t_ul_ind, &g.t_dl_ind,
                                          &g.t_local,     &g.D_L,      &g.D_S_split};
    const std::vector<double>* at[] = {&a.t_ul_shared, &a.t_ul_ind, &a.t_dl_ind, &a.t_local, &a.D_L, &a.D_S_split};
    for (int f = 0; f < 6; ++f)
      for (std::size_t u = 0; u < n; ++u) {
        if (f == 5 && sc.D_S <= 0) continue;
        const Big h = Big((*at[f])[u]) * Big("1e-12");
        const Big fd = (testing::total_energy_as<Big>(sc, a, f, u, h) - testing::total_energy_as<Big>(sc, a, f, u, -h)) /
                       (2 * h);
        const double approx = fd.convert_to<double>(), x = (*exact[f])[u];
        const double err = std::abs(x - approx) / std::max(std::abs(approx), 1e-300);
        if (err > worst) worst = err, where = std::string(names[f]) + " at point " + std::to_string(k);
      }
  }
  return {worst <= 1e-6 && worst_eval <= 1e-12,
          fmt("100 points, worst relative error %.2e", worst) + (where.empty() ? "" : " (" + where + ")") +
              fmt("; test evaluator vs total_energy %.1e", worst_eval)};
}

Outcome determinism() {
  const auto cfg = parse_config("sweep: {variable: T_max}\n");
  const std::string a = "acceptance_run_a.csv", b = "acceptance_run_b.csv";
  emit_csv(run_sweep(cfg), a);
  emit_csv(run_sweep(cfg), b);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string x = slurp(a), y = slurp(b);
  std::remove(a.c_str());
  std::remove(b.c_str());
  return {!x.empty() && x == y, std::to_string(x.size()) + " bytes per file, " + (x == y ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"local-only energy at 10 ms and 100 ms", local_only_analytic},
      {"Lambert W0 identity", lambert_identity},
      {"rate recovery from the power trade-off", inverse_identity},
      {"single shared-data carrier", winner_take_all},
      {"duality gap and KKT certificate", duality_gap},
      {"grid oracle sandwich", oracle_sandwich},
      {"latency sweep orderings", latency_sweep},
      {"shared-fraction sweep orderings", shared_sweep},
      {"energy gradient vs finite differences", gradient_check},
      {"byte-identical sweep CSV", determinism},
  };
  std::vector<std::size_t> pick;
  for (int i = 1; i < argc; ++i) {
    const long k = std::strtol(argv[i], nullptr, 10);
    if (k < 1 || k > static_cast<long>(criteria.size())) {
      std::fprintf(stderr, "criterion must be 1..%zu\n", criteria.size());
      return 2;
    }
    pick.push_back(static_cast<std::size_t>(k));
  }
  if (pick.empty())
    for (std::size_t k = 1; k <= criteria.size(); ++k) pick.push_back(k);

  bool all = true;
  for (std::size_t k : pick) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %2zu  %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", k, criteria[k - 1].first, o.detail.c_str(), s);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
