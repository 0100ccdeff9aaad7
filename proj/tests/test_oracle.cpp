#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "meco/dual_solver.hpp"
#include "meco/oracle.hpp"
#include "support.hpp"

using namespace meco;
using doctest::Approx;

namespace {

double solved(const Scenario& sc) {
  SolverOptions so;
  so.record_trace = false;
  return solve(sc, so).primal_value;
}

}  // namespace

TEST_CASE("parallel grid matches the serial reference") {
  std::mt19937_64 rng(61);
  for (int k = 0; k < 6; ++k) {
    const Scenario sc = testing::random_scenario(rng, 1 + k % 3);
    const std::size_t res = sc.num_users() == 3 ? 4 : 8;
    const auto p = grid_solve(sc, res);
    const auto s = grid_solve_reference(sc, res);
    CHECK(p.best_value == s.best_value);
    CHECK(p.best_allocation.D_L == s.best_allocation.D_L);
    CHECK(p.best_allocation.D_S_split == s.best_allocation.D_S_split);
    CHECK(p.iterations == s.iterations);
  }
}

TEST_CASE("grid refinement on one user") {
  std::mt19937_64 rng(62);
  for (int k = 0; k < 5; ++k) {
    const Scenario sc = testing::random_scenario(rng, 1);
    const double opt = solved(sc);
    double prev = kInfeasibleEnergy;
    for (std::size_t res : {4, 8, 16, 32, 64}) {
      const auto g = grid_solve(sc, res);
      CHECK(g.best_value <= prev * (1 + 1e-12));
      CHECK(g.best_value >= opt * (1 - 1e-9));
      CHECK(check_feasible(sc, g.best_allocation, 1e-6).empty());
      prev = g.best_value;
    }
    CHECK(prev <= opt * (1 + 1e-2));
  }
}

TEST_CASE("no BS budget and no shared data leave only local computing") {
  Scenario sc;
  sc.users.resize(2);
  sc.sys.E_max = 0.0;
  sc.sys.T_max = 0.02;
  std::vector<double> up(2), down(2);
  for (std::size_t u = 0; u < 2; ++u) up[u] = down[u] = 0.0;
  CHECK(optimal_time_energy(sc, up, down) == 0.0);
  const auto g = grid_solve(sc, 4);
  CHECK(g.best_value == Approx(2 * local_energy(sc, 0, 1e4, 0.02)).epsilon(1e-12));
  CHECK(solved(sc) == Approx(g.best_value).epsilon(1e-9));
}

TEST_CASE("two users send the shared block from one device") {
  std::mt19937_64 rng(63);
  for (int k = 0; k < 5; ++k) {
    Scenario sc = testing::random_scenario(rng, 2);
    sc.D_S = std::max(sc.D_S, 1e3);
    const auto g = grid_solve(sc, 8);
    const auto& s = g.best_allocation.D_S_split;
    CHECK(std::min(s[0], s[1]) == 0.0);
    CHECK(s[0] + s[1] == Approx(sc.D_S));
  }
}

TEST_CASE("projected gradient") {
  std::mt19937_64 rng(64);
  for (int k = 0; k < 4; ++k) {
    const Scenario sc = testing::random_scenario(rng, 1 + k % 2);
    const auto g = grid_solve(sc, 8);
    ProjectedGradientOptions opts;
    opts.start = g.best_allocation;
    const auto pg = projected_gradient_solve(sc, opts);
    CHECK(pg.method == OracleMethod::ProjectedGradient);
    CHECK(pg.best_value <= g.best_value * (1 + 1e-3));
    CHECK(pg.best_value >= solved(sc) * (1 - 1e-9));
    CHECK(check_feasible(sc, pg.best_allocation, 1e-6).empty());
  }
}

TEST_CASE("projection lands in the feasible set") {
  std::mt19937_64 rng(65);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    const Scenario sc = testing::random_scenario(rng, 2);
    Allocation a(2);
    for (std::size_t u = 0; u < 2; ++u) {
      a.t_ul_shared[u] = unit(rng) * sc.sys.T_max;
      a.t_ul_ind[u] = unit(rng) * sc.sys.T_max;
      a.t_dl_ind[u] = unit(rng) * sc.sys.T_max;
      a.D_L[u] = (2 * unit(rng) - 0.5) * sc.users[u].D_I;
      a.D_S_split[u] = unit(rng) * sc.D_S;
    }
    const auto p = project_feasible(sc, a);
    // bit and time limits only; the energy budget needs actual rates
    for (const auto& v : check_feasible(sc, p, 1e-6)) CHECK_MESSAGE(v.name == "bs-energy", v.name);
    const auto q = project_feasible(sc, p);
    for (std::size_t u = 0; u < 2; ++u) CHECK(std::abs(q.D_L[u] - p.D_L[u]) <= 1e-8 * sc.users[u].D_I);
  }
}

TEST_CASE("projection is the nearest feasible point") {
  // <y - p, q - p> <= 0 for every feasible q, in the scaled coordinates
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 6; ++k) {
    Scenario sc = testing::random_scenario(rng, 1 + k % 3);
    sc.sys.E_max *= 0.05;  // keep the energy budget active
    const std::size_t n = sc.num_users();
    Allocation y(n);
    for (std::size_t u = 0; u < n; ++u) {
      y.t_ul_shared[u] = unit(rng) * sc.sys.T_max;
      y.t_ul_ind[u] = unit(rng) * sc.sys.T_max;
      y.t_dl_ind[u] = unit(rng) * 0.3 * sc.sys.T_max;
      y.D_L[u] = unit(rng) * 0.5 * sc.users[u].D_I;
      y.D_S_split[u] = unit(rng) * sc.D_S;
    }
    y.t_dl_aux = unit(rng) * sc.sys.T_max;
    const Allocation p = project_feasible(sc, y);
    CHECK(bs_downlink_energy(sc, p) <= sc.sys.E_max * (1 + 1e-9));
    for (const auto& v : check_feasible(sc, p, 1e-6)) CHECK_MESSAGE(false, v.name);

    double Db = 0.0;
    for (const auto& u : sc.users) Db = std::max(Db, u.D_I);
    const double T = sc.sys.T_max;
    auto inner = [&](const Allocation& q) {
      double s = (y.t_dl_aux - p.t_dl_aux) * (q.t_dl_aux - p.t_dl_aux) / (T * T);
      for (std::size_t u = 0; u < n; ++u) {
        s += (y.t_ul_shared[u] - p.t_ul_shared[u]) * (q.t_ul_shared[u] - p.t_ul_shared[u]) / (T * T);
        s += (y.t_ul_ind[u] - p.t_ul_ind[u]) * (q.t_ul_ind[u] - p.t_ul_ind[u]) / (T * T);
        s += (y.t_dl_ind[u] - p.t_dl_ind[u]) * (q.t_dl_ind[u] - p.t_dl_ind[u]) / (T * T);
        s += (y.D_L[u] - p.D_L[u]) * (q.D_L[u] - p.D_L[u]) / (Db * Db);
        s += (y.D_S_split[u] - p.D_S_split[u]) * (q.D_S_split[u] - p.D_S_split[u]) / (Db * Db);
      }
      return s;
    };
    SolverOptions so;
    so.record_trace = false;
    const auto r = solve(sc, so);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(inner(r.allocation) <= 1e-7);
    CHECK(inner(grid_solve(sc, 2).best_allocation) <= 1e-7);
  }
}

TEST_CASE("gradient against finite differences") {
  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> unit(0.2, 0.8);
  const Scenario sc = testing::random_scenario(rng, 2);
  Allocation a(2);
  for (std::size_t u = 0; u < 2; ++u) {
    a.t_ul_shared[u] = unit(rng) * 2e-3;
    a.t_ul_ind[u] = unit(rng) * 2e-3;
    a.t_dl_ind[u] = unit(rng) * 1e-3;
    a.t_local[u] = sc.sys.T_max;
    a.D_L[u] = unit(rng) * sc.max_local_bits(u);
    a.D_S_split[u] = sc.D_S / 2;
  }
  const Allocation g = energy_gradient(sc, a);
  auto fd = [&](int field, std::size_t u, double x) {
    const long double h = 1e-6L * x;
    return static_cast<double>((testing::total_energy_as<long double>(sc, a, field, u, h) -
                                testing::total_energy_as<long double>(sc, a, field, u, -h)) /
                               (2 * h));
  };
  for (std::size_t u = 0; u < 2; ++u) {
    CHECK(g.t_ul_shared[u] == Approx(fd(0, u, a.t_ul_shared[u])).epsilon(1e-5));
    CHECK(g.t_ul_ind[u] == Approx(fd(1, u, a.t_ul_ind[u])).epsilon(1e-5));
    CHECK(g.t_local[u] == Approx(fd(3, u, a.t_local[u])).epsilon(1e-5));
    CHECK(g.D_L[u] == Approx(fd(4, u, a.D_L[u])).epsilon(1e-5));
  }
  CHECK(g.t_dl_aux == 0.0);
}

TEST_CASE("LP split oracle") {
  const std::vector<double> delta{3.0, 1.0, 2.0};
  const auto x = lp_split_oracle(delta, 6.0);
  CHECK(x == std::vector<double>{0.0, 6.0, 0.0});
  const auto tie = lp_split_oracle(std::vector<double>{1.0, 1.0}, 2.0, 4);
  CHECK(tie[0] + tie[1] == Approx(2.0));
  const auto zero = lp_split_oracle(delta, 0.0);
  for (double v : zero) CHECK(v == 0.0);
}
