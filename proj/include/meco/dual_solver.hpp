#pragma once

// Lagrangian-dual solver for joint offloading and communication resource
// allocation with shared input data.
//
// The latency constraint is used in its reduced form
//   t_{u,S}^ul + t_u^ul <= T_max - t_S^dl - t^dl,   t_u^dl <= t^dl,
// local computation always runs for the full T_max, and the dual
// (beta, omega, sigma, nu) is maximised with a deep-cut ellipsoid method.
// The Lagrangian minimiser has a closed form: Lambert-W transmission rates,
// a square-root local share, a bang-bang auxiliary download time and a
// single carrier for the shared bits.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "meco/model.hpp"

namespace meco {

class InfeasibleScenario : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DualPoint {
  std::vector<double> beta;   // latency, per user [J/s]
  std::vector<double> omega;  // local cycle budget, per user [J/cycle]
  std::vector<double> sigma;  // t_u^dl <= t^dl, per user [J/s]
  double nu = 0.0;            // BS download energy budget [J/J]

  DualPoint() = default;
  explicit DualPoint(std::size_t users, double value = 0.0)
      : beta(users, value), omega(users, value), sigma(users, value), nu(value) {}

  std::size_t users() const { return beta.size(); }
  std::size_t dimension() const { return 3 * beta.size() + 1; }
  // Layout: [beta_1..U, omega_1..U, sigma_1..U, nu].
  std::vector<double> flatten() const;
  static DualPoint unflatten(std::span<const double> v, std::size_t users);
  bool nonnegative() const;
};

// Natural magnitude of every dual coordinate, used to precondition the
// ellipsoid. Same layout as DualPoint::flatten.
std::vector<double> dual_scales(const Scenario& sc);

struct OptimalTimes {
  std::vector<double> t_ul_shared;
  std::vector<double> t_ul_ind;
  std::vector<double> t_dl_ind;
  std::vector<double> rate_ul;      // r_u^ul, shared and individual alike
  std::vector<double> rate_dl_out;  // output bits per second on the individual download
  bool unbounded = false;           // some positive payload met a zero rate
};

OptimalTimes optimal_times(const DualPoint& dual, const Scenario& sc, std::span<const double> D_L,
                           std::span<const double> D_S_split);

double optimal_t_dl_aux(const DualPoint& dual, const Scenario& sc);

std::vector<double> optimal_local_bits(const DualPoint& dual, const Scenario& sc);

struct SharedAssignment {
  std::vector<double> split;
  std::vector<double> delta;  // marginal cost per shared bit
  std::size_t carrier = 0;
};

SharedAssignment assign_shared_data(const DualPoint& dual, const Scenario& sc);

// Value of the Lagrangian at an arbitrary allocation (t_local taken from the
// allocation, not forced to T_max).
double lagrangian_value(const Scenario& sc, const Allocation& a, const DualPoint& dual);

struct DualEvalResult {
  double dual_value = 0.0;
  Allocation minimizer;
  std::vector<double> subgradient;  // same layout as DualPoint::flatten
  std::vector<double> delta;
  std::vector<double> rate_ul;
  std::vector<double> rate_dl;      // input-bit rate of the individual download
  DualPoint evaluated_at;           // the dual point after floors
};

struct DualEvalOptions {
  double eps_dual = 1e-12;   // floor on beta_u and nu
  bool allow_local = true;   // false pins D_L to zero
  std::vector<double> fixed_split;  // non-empty: shared split held fixed instead of argmin Delta
};

DualEvalResult eval_dual(const DualPoint& dual, const Scenario& sc, const DualEvalOptions& opts = {});

struct SolverOptions {
  std::size_t max_iters = 0;   // 0: 500 (3U+1)^2
  double eps_stop = 1e-9;      // relative bound on g* - best dual
  double eps_dual = 1e-12;
  double radius = 1e4;         // initial ball radius in scaled dual coordinates
  bool allow_local = true;
  bool record_trace = true;
};

enum class SolveStatus { Optimal, MaxIterations, Infeasible };
std::string to_string(SolveStatus s);

struct TraceRow {
  std::size_t iteration = 0;
  double dual_value = 0.0;
  double gap_bound = 0.0;
  double log_volume = 0.0;
  bool feasibility_cut = false;
};

struct SolveReport {
  SolveStatus status = SolveStatus::Infeasible;
  Allocation allocation;
  double primal_value = 0.0;
  double dual_value = 0.0;             // lower bound on the reduced problem
  double restricted_dual_value = 0.0;  // bound with the carrier held fixed
  double rel_gap = 0.0;
  std::map<std::string, double> kkt_residuals;
  std::size_t iterations = 0;
  std::vector<TraceRow> trace;
  DualPoint dual;  // multipliers of the problem with the carrier held fixed
  std::vector<double> shared_delta;  // marginal shared-bit costs that picked the carrier
  std::string message;
};

// Checks that the reduced problem has a feasible point at all.
void ensure_feasible(const Scenario& sc, bool allow_local = true);

// Optimal times for fixed local shares and shared split. Uplink slots fill the
// budget left by the common download window t^dl, which is chosen by
// golden-section search; the download slots at a given window follow from the
// energy-budget multiplier. Throws InfeasibleScenario if no times exist.
Allocation recover_primal(const Scenario& sc, std::span<const double> D_L,
                          std::span<const double> D_S_split);

// Maximises the dual, fixes the Lemma-1 carrier, maximises the dual of the
// carrier-fixed problem from there and recovers the primal. rel_gap is taken
// against the first (unrestricted) bound.
SolveReport solve(const Scenario& sc, const SolverOptions& opts = {});

// Primal feasibility, dual feasibility and complementary slackness of the
// reduced problem. Every entry is dimensionless: constraint violations are
// divided by their natural scale (T_max, T_max f_max, E_max, bits), products
// multiplier x slack are divided by the allocation's energy. The stationarity
// entry evaluates the dual function with `opts`.
std::map<std::string, double> kkt_residuals(const Scenario& sc, const Allocation& a,
                                            const DualPoint& dual, const DualEvalOptions& opts = {});

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);

}  // namespace meco
