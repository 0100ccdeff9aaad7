#pragma once

// System model for multi-user edge offloading with shared input data.
//
// All quantities are SI: bits, Hz, W, s, J. Energies that cannot be realised
// (positive payload in a zero-length slot) are reported as +infinity rather
// than NaN so callers can treat them as an explicit infeasibility signal.

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace meco {

inline constexpr double kInfeasibleEnergy = std::numeric_limits<double>::infinity();

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct SystemParams {
  double W_ul = 10e6;              // total uplink bandwidth [Hz]
  double W_dl = 10e6;              // total downlink bandwidth [Hz]
  double noise_density = -169.0;   // [dBm/Hz]
  double P_max = 1.0;              // BS multicast power [W]
  double E_max = 1e-3;             // BS individual-download energy budget [J]
  double T_max = 0.01;             // latency budget [s]
  double kappa0 = 1e-26;           // effective switched capacitance
  double lambda0 = 1e3;            // CPU cycles per input bit
  double a0 = 1.0;                 // output bits per input bit
  double F = 1e10;                 // cloudlet frequency [cycles/s]
};

struct UserParams {
  double D_I = 1e4;       // total input [bits]
  double h_sq = 1e-10;    // uplink power gain |h|^2
  double g_sq = 1e-10;    // downlink power gain |g|^2
  double rho_dl = 0.625;  // decoding power while receiving [J/s]
  double f_max = 1e9;     // local CPU frequency cap [cycles/s]
  double distance_km = 0.0;  // informational; 0 when gains were given directly
};

struct Scenario {
  SystemParams sys;
  std::vector<UserParams> users;
  double D_S = 0.0;  // shared input bits, identical across users

  std::size_t num_users() const { return users.size(); }
  double W_ul_user() const { return sys.W_ul / static_cast<double>(users.size()); }
  double W_dl_user() const { return sys.W_dl / static_cast<double>(users.size()); }
  double noise_ul() const;
  double noise_dl() const;
  // Individual (non-shared, non-local) bits of user u for a given local share.
  double individual_bits(std::size_t u, double D_L) const { return users[u].D_I - D_S - D_L; }
  // Largest admissible local share: min(D_I - D_S, T_max f_max / lambda0).
  double max_local_bits(std::size_t u) const;
};

// Throws DomainError describing the first violated invariant.
void validate(const Scenario& sc);

struct Allocation {
  std::vector<double> t_ul_shared;  // t_{u,S}^ul
  std::vector<double> t_ul_ind;     // t_u^ul
  std::vector<double> t_dl_ind;     // t_u^dl
  double t_dl_aux = 0.0;            // t^dl, common bound on t_u^dl
  std::vector<double> t_local;      // t_{u,L}^C
  std::vector<double> D_L;          // locally computed bits
  std::vector<double> D_S_split;    // shared bits uploaded by each user

  Allocation() = default;
  explicit Allocation(std::size_t users)
      : t_ul_shared(users, 0.0),
        t_ul_ind(users, 0.0),
        t_dl_ind(users, 0.0),
        t_local(users, 0.0),
        D_L(users, 0.0),
        D_S_split(users, 0.0) {}

  std::size_t size() const { return D_L.size(); }
};

// Link-level primitives ------------------------------------------------------

double noise_power(const SystemParams& sys, double per_user_bandwidth);
double pathloss_gain(double distance_km);

// N0 (2^{rate/W} - 1): transmit power needed for `rate` over a unit-gain link.
double f_power(double rate, double bandwidth, double noise);
// f'(rate) = N0 ln2 / W 2^{rate/W}.
double f_power_derivative(double rate, double bandwidth, double noise);

// (t/gain) f(bits/t) with the closure conventions of the perspective function.
double transmit_energy(double t, double bits, double gain, double bandwidth, double noise);

double uplink_energy_shared(const Scenario& sc, std::size_t u, double t, double bits);
double uplink_energy_individual(const Scenario& sc, std::size_t u, double t, double bits);
double local_energy(const Scenario& sc, std::size_t u, double D_L, double t_local);

double downlink_shared_time(const Scenario& sc, std::size_t u);
double downlink_shared_latency(const Scenario& sc);

double bs_downlink_energy(const Scenario& sc, const Allocation& a);

// Completion time of every user, including cloudlet compute times.
std::vector<double> total_latency(const Scenario& sc, const Allocation& a, double t_S_C,
                                  const std::vector<double>& t_u_C);

// Latency when cloudlet computation is hidden behind transmissions.
std::vector<double> simplified_latency(const Scenario& sc, const Allocation& a);

double total_energy(const Scenario& sc, const Allocation& a);
std::vector<double> user_energies(const Scenario& sc, const Allocation& a);

struct Violation {
  std::string name;
  std::size_t user;  // npos for scenario-wide constraints
  double amount;     // normalised by the constraint's natural scale
};
inline constexpr std::size_t kAllUsers = static_cast<std::size_t>(-1);

// Checks every constraint of the original problem. Each violation is divided by
// its natural scale (T_max for times, max D_I for bits, E_max for energy,
// T_max f_max for cycles) and reported when it exceeds `tol`.
std::vector<Violation> check_feasible(const Scenario& sc, const Allocation& a, double tol);

struct CloudletTimes {
  double t_S_C = 0.0;
  std::vector<double> t_u_C;
  bool shared_hidden = true;      // t_S_C <= eps * min_u t_u^ul
  bool individual_hidden = true;  // t_u_C <= eps * t_{u,S}^dl for all u
};

// Cloudlet executes shared then individual tasks at frequency F.
CloudletTimes cloudlet_compute_times(const Scenario& sc, const Allocation& a, double eps = 0.1);

}  // namespace meco
