#include "meco/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace meco {

double Scenario::noise_ul() const { return noise_power(sys, W_ul_user()); }
double Scenario::noise_dl() const { return noise_power(sys, W_dl_user()); }

double Scenario::max_local_bits(std::size_t u) const {
  const auto& user = users[u];
  return std::max(0.0, std::min(user.D_I - D_S, sys.T_max * user.f_max / sys.lambda0));
}

void validate(const Scenario& sc) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw DomainError("invalid scenario: " + what);
  };
  const auto& s = sc.sys;
  require(!sc.users.empty(), "at least one user is required");
  require(s.W_ul > 0 && s.W_dl > 0, "bandwidths must be positive");
  require(std::isfinite(s.noise_density), "noise density must be finite");
  require(s.P_max > 0, "P_max must be positive");
  require(s.E_max >= 0, "E_max must be nonnegative");
  require(s.T_max > 0, "T_max must be positive");
  require(s.kappa0 > 0 && s.lambda0 > 0 && s.a0 > 0, "kappa0, lambda0 and a0 must be positive");
  require(s.F > 0, "cloudlet frequency must be positive");
  require(sc.D_S >= 0, "shared bits must be nonnegative");
  for (std::size_t u = 0; u < sc.users.size(); ++u) {
    const auto& user = sc.users[u];
    const std::string tag = "user " + std::to_string(u) + ": ";
    require(user.D_I >= sc.D_S, tag + "input bits must cover the shared bits");
    require(user.h_sq > 0 && user.g_sq > 0, tag + "channel gains must be positive");
    require(user.rho_dl >= 0, tag + "decoding power must be nonnegative");
    require(user.f_max > 0, tag + "f_max must be positive");
  }
}

double noise_power(const SystemParams& sys, double per_user_bandwidth) {
  return std::pow(10.0, (sys.noise_density - 30.0) / 10.0) * per_user_bandwidth;
}

double pathloss_gain(double distance_km) {
  if (!(distance_km > 0)) throw DomainError("pathloss_gain: distance must be positive");
  return std::pow(10.0, -(128.1 + 37.6 * std::log10(distance_km)) / 10.0);
}

double f_power(double rate, double bandwidth, double noise) {
  return noise * std::expm1(rate / bandwidth * std::numbers::ln2);
}

double f_power_derivative(double rate, double bandwidth, double noise) {
  return noise * std::numbers::ln2 / bandwidth * std::exp2(rate / bandwidth);
}

double transmit_energy(double t, double bits, double gain, double bandwidth, double noise) {
  if (bits <= 0) return 0.0;
  if (t <= 0) return kInfeasibleEnergy;
  return t / gain * f_power(bits / t, bandwidth, noise);
}

double uplink_energy_shared(const Scenario& sc, std::size_t u, double t, double bits) {
  return transmit_energy(t, bits, sc.users[u].h_sq, sc.W_ul_user(), sc.noise_ul());
}

double uplink_energy_individual(const Scenario& sc, std::size_t u, double t, double bits) {
  return uplink_energy_shared(sc, u, t, bits);
}

double local_energy(const Scenario& sc, std::size_t u, double D_L, double t_local) {
  (void)u;
  if (D_L <= 0) return 0.0;
  if (t_local <= 0) return kInfeasibleEnergy;
  const double cycles = sc.sys.lambda0 * D_L;
  return sc.sys.kappa0 * cycles * cycles * cycles / (t_local * t_local);
}

double downlink_shared_time(const Scenario& sc, std::size_t u) {
  if (sc.D_S <= 0) return 0.0;
  const double n0 = sc.noise_dl();
  const double rate = sc.W_dl_user() * std::log2(1.0 + sc.sys.P_max * sc.users[u].g_sq / n0);
  return sc.sys.a0 * sc.D_S / rate;
}

double downlink_shared_latency(const Scenario& sc) {
  double t = 0.0;
  for (std::size_t u = 0; u < sc.num_users(); ++u) t = std::max(t, downlink_shared_time(sc, u));
  return t;
}

double bs_downlink_energy(const Scenario& sc, const Allocation& a) {
  const double w = sc.W_dl_user();
  const double n0 = sc.noise_dl();
  double e = 0.0;
  for (std::size_t u = 0; u < sc.num_users(); ++u) {
    const double bits = sc.sys.a0 * sc.individual_bits(u, a.D_L[u]);
    e += transmit_energy(a.t_dl_ind[u], bits, sc.users[u].g_sq, w, n0);
  }
  return e;
}

std::vector<double> total_latency(const Scenario& sc, const Allocation& a, double t_S_C,
                                  const std::vector<double>& t_u_C) {
  const std::size_t n = sc.num_users();
  double shared_up_done = 0.0;
  double all_up_done = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    shared_up_done = std::max(shared_up_done, a.t_ul_shared[v]);
    all_up_done = std::max(all_up_done, a.t_ul_shared[v] + a.t_ul_ind[v]);
  }
  const double shared_compute_done = shared_up_done + t_S_C;
  const double multicast_done = std::max(shared_compute_done, all_up_done) + downlink_shared_latency(sc);
  std::vector<double> tau(n);
  for (std::size_t u = 0; u < n; ++u) {
    const double own_compute_done =
        std::max(a.t_ul_shared[u] + a.t_ul_ind[u], shared_compute_done) + t_u_C[u];
    tau[u] = std::max(own_compute_done, multicast_done) + a.t_dl_ind[u];
  }
  return tau;
}

std::vector<double> simplified_latency(const Scenario& sc, const Allocation& a) {
  double all_up_done = 0.0;
  for (std::size_t v = 0; v < sc.num_users(); ++v)
    all_up_done = std::max(all_up_done, a.t_ul_shared[v] + a.t_ul_ind[v]);
  const double t_S_dl = downlink_shared_latency(sc);
  std::vector<double> tau(sc.num_users());
  for (std::size_t u = 0; u < sc.num_users(); ++u) tau[u] = all_up_done + t_S_dl + a.t_dl_ind[u];
  return tau;
}

std::vector<double> user_energies(const Scenario& sc, const Allocation& a) {
  std::vector<double> e(sc.num_users());
  for (std::size_t u = 0; u < sc.num_users(); ++u) {
    e[u] = local_energy(sc, u, a.D_L[u], a.t_local[u]) +
           uplink_energy_shared(sc, u, a.t_ul_shared[u], a.D_S_split[u]) +
           uplink_energy_individual(sc, u, a.t_ul_ind[u], sc.individual_bits(u, a.D_L[u])) +
           (downlink_shared_time(sc, u) + a.t_dl_ind[u]) * sc.users[u].rho_dl;
  }
  return e;
}

double total_energy(const Scenario& sc, const Allocation& a) {
  double e = 0.0;
  for (double x : user_energies(sc, a)) e += x;
  return e;
}

std::vector<Violation> check_feasible(const Scenario& sc, const Allocation& a, double tol) {
  std::vector<Violation> out;
  const std::size_t n = sc.num_users();
  const auto& s = sc.sys;
  double bits_scale = 0.0;
  for (const auto& user : sc.users) bits_scale = std::max(bits_scale, user.D_I);
  bits_scale = std::max(bits_scale, 1.0);

  auto report = [&](const char* name, std::size_t u, double amount) {
    if (amount > tol || std::isnan(amount)) out.push_back({name, u, amount});
  };

  if (a.size() != n) {
    out.push_back({"dimension", kAllUsers, std::abs(static_cast<double>(a.size()) - n)});
    return out;
  }

  const auto tau = simplified_latency(sc, a);
  for (std::size_t u = 0; u < n; ++u) report("latency", u, (tau[u] - s.T_max) / s.T_max);

  const double e_bs = bs_downlink_energy(sc, a);
  report("energy-budget", kAllUsers, (e_bs - s.E_max) / std::max(s.E_max, 1e-300));

  double split_sum = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    const auto& user = sc.users[u];
    report("local-time", u, std::max(-a.t_local[u], a.t_local[u] - s.T_max) / s.T_max);
    report("local-cycles", u,
           (s.lambda0 * a.D_L[u] - a.t_local[u] * user.f_max) / (s.T_max * user.f_max));
    report("local-bits", u, std::max(-a.D_L[u], a.D_L[u] - (user.D_I - sc.D_S)) / bits_scale);
    report("shared-split-sign", u, -a.D_S_split[u] / bits_scale);
    const double neg_time = std::max({-a.t_ul_shared[u], -a.t_ul_ind[u], -a.t_dl_ind[u]});
    report("nonnegative", u, neg_time / s.T_max);
    split_sum += a.D_S_split[u];
  }
  report("shared-split", kAllUsers, std::abs(split_sum - sc.D_S) / bits_scale);
  return out;
}

CloudletTimes cloudlet_compute_times(const Scenario& sc, const Allocation& a, double eps) {
  CloudletTimes out;
  const std::size_t n = sc.num_users();
  out.t_S_C = sc.sys.lambda0 * sc.D_S / sc.sys.F;
  out.t_u_C.resize(n);
  double min_ul = std::numeric_limits<double>::infinity();
  for (std::size_t u = 0; u < n; ++u) {
    out.t_u_C[u] = sc.sys.lambda0 * std::max(0.0, sc.individual_bits(u, a.D_L[u])) / sc.sys.F;
    if (a.t_ul_ind[u] > 0) min_ul = std::min(min_ul, a.t_ul_ind[u]);
    if (out.t_u_C[u] > eps * downlink_shared_time(sc, u)) out.individual_hidden = false;
  }
  if (std::isinf(min_ul))
    out.shared_hidden = out.t_S_C == 0.0;
  else
    out.shared_hidden = out.t_S_C <= eps * min_ul;
  return out;
}

}  // namespace meco
