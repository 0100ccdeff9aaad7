#pragma once

// Helpers shared by the test executables.

#include <cmath>
#include <random>

#include "meco/model.hpp"

namespace meco::testing {

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
  return std::exp(d(rng));
}

// Random feasible scenario: distances in [50 m, 500 m], T_max in [10, 100] ms
// (so full local computing always fits), shared fraction in [0, 0.9],
// E_max log-uniform in [0.3, 3] mJ.
inline Scenario random_scenario(std::mt19937_64& rng, std::size_t users) {
  std::uniform_real_distribution<double> dist(0.05, 0.5), T(0.01, 0.1), frac(0.0, 0.9);
  Scenario sc;
  sc.sys.T_max = T(rng);
  sc.sys.E_max = log_uniform(rng, 3e-4, 3e-3);
  for (std::size_t u = 0; u < users; ++u) {
    UserParams p;
    p.distance_km = dist(rng);
    p.h_sq = p.g_sq = pathloss_gain(p.distance_km);
    sc.users.push_back(p);
  }
  sc.D_S = frac(rng) * sc.users.front().D_I;
  return sc;
}

// Golden-section minimiser of a unimodal f on [a, b].
template <class F>
double golden_min(F&& f, double a, double b, int iters = 200) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int k = 0; k < iters && b - a > 1e-15 * (std::abs(a) + std::abs(b)); ++k) {
    if (fc <= fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a), fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Second, term-by-term evaluation of the total energy in any floating type R,
// with one variable shifted by `delta`: field 0..5 = t_ul_shared, t_ul_ind,
// t_dl_ind, t_local, D_L, D_S_split of user `pu`.
template <class R>
R total_energy_as(const Scenario& sc, const Allocation& a, int field = -1, std::size_t pu = 0, R delta = R(0)) {
  using std::exp;
  using std::log;
  using std::pow;
  const std::size_t n = sc.num_users();
  const R W = R(sc.sys.W_ul) / R(static_cast<double>(n));
  const R N0 = pow(R(10), (R(sc.sys.noise_density) - R(30)) / R(10)) * W;
  const R ln2 = log(R(2));
  auto value = [&](int f, std::size_t u, double v) { return R(v) + ((f == field && u == pu) ? delta : R(0)); };
  auto send = [&](R t, R bits, double gain) {
    if (!(bits > R(0))) return R(0);
    return t / R(gain) * N0 * (exp(bits / t / W * ln2) - R(1));
  };
  R e = R(0);
  for (std::size_t u = 0; u < n; ++u) {
    const auto& user = sc.users[u];
    const R ts = value(0, u, a.t_ul_shared[u]), tu = value(1, u, a.t_ul_ind[u]), td = value(2, u, a.t_dl_ind[u]);
    const R tl = value(3, u, a.t_local[u]), dl = value(4, u, a.D_L[u]), ds = value(5, u, a.D_S_split[u]);
    const R cycles = R(sc.sys.lambda0) * dl;
    e += R(sc.sys.kappa0) * cycles * cycles * cycles / (tl * tl);
    e += send(ts, ds, user.h_sq);
    e += send(tu, R(user.D_I) - R(sc.D_S) - dl, user.h_sq);
    // shared multicast time is a scenario constant
    e += R(user.rho_dl) * (R(downlink_shared_time(sc, u)) + td);
  }
  return e;
}

}  // namespace meco::testing
