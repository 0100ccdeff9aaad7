#include "meco/dual_solver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "meco/ellipsoid.hpp"
#include "meco/lambertw.hpp"

namespace meco {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Links {
  double w_ul, w_dl, n_ul, n_dl;
  explicit Links(const Scenario& sc)
      : w_ul(sc.W_ul_user()), w_dl(sc.W_dl_user()), n_ul(sc.noise_ul()), n_dl(sc.noise_dl()) {}
};

double reference_energy(const Scenario& sc) {
  const auto& s = sc.sys;
  double e = 0.0;
  for (const auto& user : sc.users) {
    const double cycles = s.lambda0 * std::max(0.0, user.D_I - sc.D_S);
    e += s.kappa0 * cycles * cycles * cycles / (s.T_max * s.T_max) + user.rho_dl * s.T_max;
  }
  e /= static_cast<double>(sc.num_users());
  return e > 0 ? e : 1e-12;
}

// Download slot lengths for window `tau` at energy price `mu`; each slot is the
// unconstrained minimiser of rho t + mu e_u(t), capped at tau.
void download_slots(const Scenario& sc, const Links& l, const std::vector<double>& bits_out,
                    double tau, double mu, std::vector<double>& t) {
  for (std::size_t u = 0; u < sc.num_users(); ++u) {
    if (bits_out[u] <= 0) {
      t[u] = 0.0;
      continue;
    }
    const double rho = sc.users[u].rho_dl;
    const double x = rho > 0 ? rate_from_dual(rho / mu, sc.users[u].g_sq, l.n_dl, l.w_dl) : 0.0;
    t[u] = x > 0 ? std::min(tau, bits_out[u] / x) : tau;
  }
}

double download_energy(const Scenario& sc, const Links& l, const std::vector<double>& bits_out,
                       const std::vector<double>& t) {
  double e = 0.0;
  for (std::size_t u = 0; u < sc.num_users(); ++u)
    e += transmit_energy(t[u], bits_out[u], sc.users[u].g_sq, l.w_dl, l.n_dl);
  return e;
}

// Cheapest decoding cost with every download inside `tau` and the BS budget
// respected; +inf when even full-window slots overrun the budget.
double download_cost(const Scenario& sc, const Links& l, const std::vector<double>& bits_out,
                     double tau, std::vector<double>& t) {
  const std::size_t n = sc.num_users();
  bool any = false;
  for (double b : bits_out) any = any || b > 0;
  if (!any) {
    std::fill(t.begin(), t.end(), 0.0);
    return 0.0;
  }
  if (!(tau > 0)) return kInf;
  for (std::size_t u = 0; u < n; ++u) t[u] = bits_out[u] > 0 ? tau : 0.0;
  if (download_energy(sc, l, bits_out, t) > sc.sys.E_max) return kInf;

  double hi = 1.0;
  download_slots(sc, l, bits_out, tau, hi, t);
  for (int k = 0; k < 2000 && download_energy(sc, l, bits_out, t) > sc.sys.E_max; ++k) {
    hi *= 4.0;
    download_slots(sc, l, bits_out, tau, hi, t);
  }
  double lo = hi;
  bool bracketed = false;
  for (int k = 0; k < 2000 && lo > 1e-300; ++k) {
    lo *= 0.25;
    download_slots(sc, l, bits_out, tau, lo, t);
    if (download_energy(sc, l, bits_out, t) > sc.sys.E_max) {
      bracketed = true;
      break;
    }
    hi = lo;
  }
  if (bracketed) {
    for (int k = 0; k < 200 && hi > lo * (1.0 + 4e-16); ++k) {
      const double mid = std::sqrt(lo * hi);
      download_slots(sc, l, bits_out, tau, mid, t);
      if (download_energy(sc, l, bits_out, t) > sc.sys.E_max)
        lo = mid;
      else
        hi = mid;
    }
  }
  download_slots(sc, l, bits_out, tau, hi, t);
  double cost = 0.0;
  for (std::size_t u = 0; u < n; ++u) cost += sc.users[u].rho_dl * t[u];
  return cost;
}

double uplink_cost(const Scenario& sc, const Links& l, const std::vector<double>& bits_up, double A) {
  double e = 0.0;
  for (std::size_t u = 0; u < sc.num_users(); ++u)
    e += transmit_energy(A, bits_up[u], sc.users[u].h_sq, l.w_ul, l.n_ul);
  return e;
}

}  // namespace

std::vector<double> DualPoint::flatten() const {
  std::vector<double> v;
  v.reserve(dimension());
  v.insert(v.end(), beta.begin(), beta.end());
  v.insert(v.end(), omega.begin(), omega.end());
  v.insert(v.end(), sigma.begin(), sigma.end());
  v.push_back(nu);
  return v;
}

DualPoint DualPoint::unflatten(std::span<const double> v, std::size_t users) {
  if (v.size() != 3 * users + 1) throw std::invalid_argument("DualPoint::unflatten: bad dimension");
  DualPoint d;
  d.beta.assign(v.begin(), v.begin() + users);
  d.omega.assign(v.begin() + users, v.begin() + 2 * users);
  d.sigma.assign(v.begin() + 2 * users, v.begin() + 3 * users);
  d.nu = v[3 * users];
  return d;
}

bool DualPoint::nonnegative() const {
  auto nonneg = [](const std::vector<double>& x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return v >= 0; });
  };
  return nonneg(beta) && nonneg(omega) && nonneg(sigma) && nu >= 0;
}

std::vector<double> dual_scales(const Scenario& sc) {
  const std::size_t n = sc.num_users();
  const double e_ref = reference_energy(sc);
  const double T = sc.sys.T_max;
  std::vector<double> s(3 * n + 1);
  for (std::size_t u = 0; u < n; ++u) {
    s[u] = e_ref / T;
    s[n + u] = e_ref / (T * sc.users[u].f_max);
    s[2 * n + u] = e_ref / T;
  }
  s[3 * n] = sc.sys.E_max > 0 ? e_ref / sc.sys.E_max : 1.0;
  return s;
}

OptimalTimes optimal_times(const DualPoint& dual, const Scenario& sc, std::span<const double> D_L,
                           std::span<const double> D_S_split) {
  const Links l(sc);
  const std::size_t n = sc.num_users();
  OptimalTimes out;
  out.t_ul_shared.resize(n);
  out.t_ul_ind.resize(n);
  out.t_dl_ind.resize(n);
  out.rate_ul.resize(n);
  out.rate_dl_out.resize(n);
  auto slot = [&out](double bits, double rate) {
    if (bits <= 0) return 0.0;
    if (rate <= 0) {
      out.unbounded = true;
      return kInf;
    }
    return bits / rate;
  };
  for (std::size_t u = 0; u < n; ++u) {
    const auto& user = sc.users[u];
    const double r = rate_from_dual(dual.beta[u], user.h_sq, l.n_ul, l.w_ul);
    const double price_dl = dual.nu > 0 ? (user.rho_dl + dual.sigma[u]) / dual.nu : kInf;
    const double x = std::isinf(price_dl) ? kInf : rate_from_dual(price_dl, user.g_sq, l.n_dl, l.w_dl);
    const double b = sc.individual_bits(u, D_L[u]);
    out.rate_ul[u] = r;
    out.rate_dl_out[u] = x;
    out.t_ul_shared[u] = slot(D_S_split[u], r);
    out.t_ul_ind[u] = slot(b, r);
    out.t_dl_ind[u] = slot(sc.sys.a0 * b, x);
  }
  return out;
}

double optimal_t_dl_aux(const DualPoint& dual, const Scenario& sc) {
  const double t_S = downlink_shared_latency(sc);
  if (t_S > sc.sys.T_max) throw InfeasibleScenario("shared multicast alone exceeds T_max");
  double diff = 0.0;
  for (std::size_t u = 0; u < sc.num_users(); ++u) diff += dual.beta[u] - dual.sigma[u];
  return diff > 0 ? 0.0 : sc.sys.T_max - t_S;
}

std::vector<double> optimal_local_bits(const DualPoint& dual, const Scenario& sc) {
  const Links l(sc);
  const auto& s = sc.sys;
  const std::size_t n = sc.num_users();
  const double k3 = 3.0 * s.kappa0 * s.lambda0 * s.lambda0 * s.lambda0;
  std::vector<double> D_L(n);
  for (std::size_t u = 0; u < n; ++u) {
    const auto& user = sc.users[u];
    const double r = rate_from_dual(dual.beta[u], user.h_sq, l.n_ul, l.w_ul);
    const double up = l.n_ul * std::numbers::ln2 / k3 * std::exp2(r / l.w_ul) / (l.w_ul * user.h_sq);
    double down = 0.0;
    if (dual.nu > 0) {
      const double x =
          rate_from_dual((user.rho_dl + dual.sigma[u]) / dual.nu, user.g_sq, l.n_dl, l.w_dl);
      down = l.n_dl * std::numbers::ln2 / k3 * dual.nu * s.a0 * std::exp2(x / l.w_dl) /
             (l.w_dl * user.g_sq);
    } else {
      // nu -> 0 drives the download rate up without bound; its marginal cost
      // per bit tends to (rho + sigma) / x -> 0.
      down = 0.0;
    }
    const double bracket = up + down - dual.omega[u] / (3.0 * s.kappa0 * s.lambda0 * s.lambda0);
    D_L[u] = std::min(s.T_max * std::sqrt(std::max(bracket, 0.0)), user.D_I - sc.D_S);
  }
  return D_L;
}

SharedAssignment assign_shared_data(const DualPoint& dual, const Scenario& sc) {
  const Links l(sc);
  const std::size_t n = sc.num_users();
  SharedAssignment out;
  out.split.assign(n, 0.0);
  out.delta.assign(n, kInf);
  double best = kInf;
  bool found = false;
  for (std::size_t u = 0; u < n; ++u) {
    const double h = sc.users[u].h_sq;
    const double r = rate_from_dual(dual.beta[u], h, l.n_ul, l.w_ul);
    if (r <= 0) continue;
    out.delta[u] = f_power(r, l.w_ul, l.n_ul) / (r * h) + dual.beta[u] / r;
    if (!found || out.delta[u] < best) {
      best = out.delta[u];
      out.carrier = u;
      found = true;
    }
  }
  if (!found) {
    if (sc.D_S > 0) throw DomainError("assign_shared_data: degenerate-duals (all uplink rates zero)");
    return out;
  }
  out.split[out.carrier] = sc.D_S;
  return out;
}

double lagrangian_value(const Scenario& sc, const Allocation& a, const DualPoint& dual) {
  const auto& s = sc.sys;
  const double t_S = downlink_shared_latency(sc);
  double L = total_energy(sc, a);
  for (std::size_t u = 0; u < sc.num_users(); ++u) {
    L += dual.beta[u] * (a.t_ul_shared[u] + a.t_ul_ind[u] - s.T_max + t_S + a.t_dl_aux);
    L += dual.omega[u] * (s.lambda0 * a.D_L[u] - a.t_local[u] * sc.users[u].f_max);
    L += dual.sigma[u] * (a.t_dl_ind[u] - a.t_dl_aux);
  }
  L += dual.nu * (bs_downlink_energy(sc, a) - s.E_max);
  return L;
}

DualEvalResult eval_dual(const DualPoint& dual, const Scenario& sc, const DualEvalOptions& opts) {
  const std::size_t n = sc.num_users();
  const auto& s = sc.sys;
  DualPoint d = dual;
  for (std::size_t u = 0; u < n; ++u) {
    d.beta[u] = std::max(d.beta[u], opts.eps_dual);
    d.omega[u] = std::max(d.omega[u], 0.0);
    d.sigma[u] = std::max(d.sigma[u], 0.0);
  }
  d.nu = std::max(d.nu, opts.eps_dual);

  DualEvalResult out;
  auto D_L = opts.allow_local ? optimal_local_bits(d, sc) : std::vector<double>(n, 0.0);
  auto shared = assign_shared_data(d, sc);
  if (!opts.fixed_split.empty()) {
    if (opts.fixed_split.size() != n) throw std::invalid_argument("eval_dual: fixed_split size mismatch");
    shared.split = opts.fixed_split;
  }
  auto times = optimal_times(d, sc, D_L, shared.split);
  if (times.unbounded) throw DomainError("eval_dual: degenerate-duals (zero rate with payload)");

  Allocation& m = out.minimizer;
  m.t_ul_shared = times.t_ul_shared;
  m.t_ul_ind = times.t_ul_ind;
  m.t_dl_ind = times.t_dl_ind;
  m.t_dl_aux = optimal_t_dl_aux(d, sc);
  m.t_local.assign(n, s.T_max);
  m.D_L = std::move(D_L);
  m.D_S_split = shared.split;

  out.dual_value = lagrangian_value(sc, m, d);

  const double t_S = downlink_shared_latency(sc);
  out.subgradient.resize(3 * n + 1);
  for (std::size_t u = 0; u < n; ++u) {
    out.subgradient[u] = m.t_ul_shared[u] + m.t_ul_ind[u] - s.T_max + t_S + m.t_dl_aux;
    out.subgradient[n + u] = s.lambda0 * m.D_L[u] - s.T_max * sc.users[u].f_max;
    out.subgradient[2 * n + u] = m.t_dl_ind[u] - m.t_dl_aux;
  }
  out.subgradient[3 * n] = bs_downlink_energy(sc, m) - s.E_max;

  out.delta = std::move(shared.delta);
  out.rate_ul = times.rate_ul;
  out.rate_dl.resize(n);
  for (std::size_t u = 0; u < n; ++u) out.rate_dl[u] = times.rate_dl_out[u] / s.a0;
  out.evaluated_at = std::move(d);
  return out;
}

void ensure_feasible(const Scenario& sc, bool allow_local) {
  validate(sc);
  const std::size_t n = sc.num_users();
  const Links l(sc);
  const double t_S = downlink_shared_latency(sc);
  const double budget = sc.sys.T_max - t_S;
  std::vector<double> up(n), down(n), t(n);
  bool any_up = false, any_down = false;
  for (std::size_t u = 0; u < n; ++u) {
    const double local = allow_local ? sc.max_local_bits(u) : 0.0;
    const double b = sc.individual_bits(u, local);
    up[u] = b + (u == 0 ? sc.D_S : 0.0);
    down[u] = sc.sys.a0 * b;
    any_up = any_up || up[u] > 0;
    any_down = any_down || down[u] > 0;
  }
  if ((any_up || any_down) && !(budget > 0))
    throw InfeasibleScenario("shared multicast leaves no time for the remaining transfers");
  if (any_down) {
    for (std::size_t u = 0; u < n; ++u) t[u] = down[u] > 0 ? budget : 0.0;
    if (!(download_energy(sc, l, down, t) < sc.sys.E_max))
      throw InfeasibleScenario("BS energy budget cannot deliver the offloaded results within T_max");
  }
}

Allocation recover_primal(const Scenario& sc, std::span<const double> D_L,
                          std::span<const double> D_S_split) {
  const std::size_t n = sc.num_users();
  const auto& s = sc.sys;
  const Links l(sc);
  const double budget = s.T_max - downlink_shared_latency(sc);

  std::vector<double> up(n), down(n), t(n);
  bool any_up = false, any_down = false;
  for (std::size_t u = 0; u < n; ++u) {
    const double b = std::max(0.0, sc.individual_bits(u, D_L[u]));
    up[u] = b + D_S_split[u];
    down[u] = s.a0 * b;
    any_up = any_up || up[u] > 0;
    any_down = any_down || down[u] > 0;
  }

  double tau = 0.0;
  if (any_down) {
    for (std::size_t u = 0; u < n; ++u) t[u] = down[u] > 0 ? budget : 0.0;
    if (!(budget > 0) || download_energy(sc, l, down, t) > s.E_max)
      throw InfeasibleScenario("recover_primal: no download window meets the BS budget");
    // Smallest window on which full-length slots fit the budget.
    double lo = 0.0, hi = budget;
    for (int k = 0; k < 200 && hi - lo > 1e-15 * budget; ++k) {
      const double mid = 0.5 * (lo + hi);
      for (std::size_t u = 0; u < n; ++u) t[u] = down[u] > 0 ? mid : 0.0;
      if (download_energy(sc, l, down, t) > s.E_max)
        lo = mid;
      else
        hi = mid;
    }
    auto objective = [&](double window) {
      const double A = budget - window;
      if (any_up && !(A > 0)) return kInf;
      return uplink_cost(sc, l, up, A) + download_cost(sc, l, down, window, t);
    };
    // Golden section; the objective is convex in the window length.
    constexpr double kRatio = 0.6180339887498949;
    double a = hi, b = budget;
    double c = b - kRatio * (b - a), dd = a + kRatio * (b - a);
    double fc = objective(c), fd = objective(dd);
    for (int k = 0; k < 200 && b - a > 1e-13 * budget; ++k) {
      if (fc <= fd) {
        b = dd;
        dd = c;
        fd = fc;
        c = b - kRatio * (b - a);
        fc = objective(c);
      } else {
        a = c;
        c = dd;
        fc = fd;
        dd = a + kRatio * (b - a);
        fd = objective(dd);
      }
    }
    tau = fc <= fd ? c : dd;
    if (objective(a) <= std::min(fc, fd)) tau = a;
    if (!std::isfinite(objective(tau)))
      throw InfeasibleScenario("recover_primal: no feasible download window");
    download_cost(sc, l, down, tau, t);
  } else {
    std::fill(t.begin(), t.end(), 0.0);
  }

  const double A = budget - tau;
  if (any_up && !(A > 0)) throw InfeasibleScenario("recover_primal: no time left for the uplink");

  Allocation out(n);
  for (std::size_t u = 0; u < n; ++u) {
    out.D_L[u] = D_L[u];
    out.D_S_split[u] = D_S_split[u];
    out.t_local[u] = s.T_max;
    out.t_dl_ind[u] = t[u];
    if (up[u] > 0) {
      out.t_ul_shared[u] = A * D_S_split[u] / up[u];
      out.t_ul_ind[u] = A * (up[u] - D_S_split[u]) / up[u];
    }
  }
  out.t_dl_aux = tau;
  return out;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::MaxIterations:
      return "max_iters";
    case SolveStatus::Infeasible:
      return "infeasible";
  }
  return "unknown";
}

namespace {

struct DualMax {
  double best = -kInf;
  DualPoint best_point;
  bool converged = false;
  std::size_t iterations = 0;
};

// Deep-cut ellipsoid ascent in coordinates scaled by dual_scales, started
// from the scaled point `start`.
DualMax maximize_dual(const Scenario& sc, const DualEvalOptions& eval_opts, const SolverOptions& opts,
                      const Eigen::VectorXd& start, std::size_t max_iters, std::vector<TraceRow>* trace,
                      std::size_t it0) {
  const std::size_t users = sc.num_users();
  const std::size_t dim = 3 * users + 1;
  const auto scales_v = dual_scales(sc);
  const double floor_value = 1e-12 * reference_energy(sc);

  // Feasible region in scaled coordinates: beta and nu at or above the floor,
  // omega and sigma nonnegative. Keeping the centre inside it means every
  // evaluation happens exactly at the centre.
  Eigen::VectorXd lower = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t u = 0; u < users; ++u) lower[static_cast<Eigen::Index>(u)] = opts.eps_dual / scales_v[u];
  lower[static_cast<Eigen::Index>(3 * users)] = opts.eps_dual / scales_v[3 * users];

  Ellipsoid ell(start, opts.radius);
  DualMax out;
  out.best_point = DualPoint(users, 0.0);
  double upper = kInf;
  std::vector<double> lambda(dim);
  std::size_t it = 0;

  for (; it < max_iters; ++it) {
    const Eigen::VectorXd c = ell.center();
    Eigen::Index j;
    const double violation = (lower - c).maxCoeff(&j);
    if (violation > 0) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
      e[j] = 1.0;
      if (ell.cut(e, violation) == Ellipsoid::CutResult::Empty) break;
      if (trace) trace->push_back({it0 + it, out.best, upper - out.best, ell.log_volume(), true});
      continue;
    }

    for (std::size_t i = 0; i < dim; ++i) lambda[i] = c[static_cast<Eigen::Index>(i)] * scales_v[i];
    const auto ev = eval_dual(DualPoint::unflatten(lambda, users), sc, eval_opts);
    Eigen::VectorXd sub(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) sub[static_cast<Eigen::Index>(i)] = ev.subgradient[i] * scales_v[i];
    if (ev.dual_value > out.best) {
      out.best = ev.dual_value;
      out.best_point = ev.evaluated_at;
    }
    const double width = ell.support(sub);
    upper = std::min(upper, ev.dual_value + width);
    if (trace) trace->push_back({it0 + it, ev.dual_value, upper - out.best, ell.log_volume(), false});

    if (upper - out.best <= opts.eps_stop * std::max(std::abs(out.best), floor_value) || width == 0.0 ||
        ell.cut(sub, out.best - ev.dual_value) == Ellipsoid::CutResult::Empty) {
      out.converged = true;
      ++it;
      break;
    }
  }
  out.iterations = it;
  return out;
}

}  // namespace

SolveReport solve(const Scenario& sc, const SolverOptions& opts) {
  SolveReport report;
  try {
    ensure_feasible(sc, opts.allow_local);
  } catch (const InfeasibleScenario& e) {
    report.status = SolveStatus::Infeasible;
    report.message = e.what();
    return report;
  }

  const std::size_t users = sc.num_users();
  const std::size_t dim = 3 * users + 1;
  const std::size_t max_iters = opts.max_iters ? opts.max_iters : 500 * dim * dim;
  auto* trace = opts.record_trace ? &report.trace : nullptr;
  DualEvalOptions eval_opts{opts.eps_dual, opts.allow_local, {}};

  const auto free = maximize_dual(sc, eval_opts, opts, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(dim)),
                                  max_iters, trace, 0);
  report.dual_value = free.best;
  {
    const auto at_best = eval_dual(free.best_point, sc, eval_opts);
    eval_opts.fixed_split = at_best.minimizer.D_S_split;
    report.shared_delta = at_best.delta;
  }

  // With the carrier fixed the problem is a smooth convex program again; its
  // own multipliers certify the recovered allocation.
  DualMax fixed = free;
  bool converged = free.converged;
  if (users > 1 && sc.D_S > 0) {
    const auto scales_v = dual_scales(sc);
    const auto flat = free.best_point.flatten();
    Eigen::VectorXd start(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) start[static_cast<Eigen::Index>(i)] = flat[i] / scales_v[i];
    fixed = maximize_dual(sc, eval_opts, opts, start, max_iters, trace, free.iterations);
    fixed.iterations += free.iterations;
    converged = converged && fixed.converged;
  }
  report.iterations = fixed.iterations;
  report.dual = fixed.best_point;
  report.restricted_dual_value = fixed.best;

  const auto final_eval = eval_dual(fixed.best_point, sc, eval_opts);
  std::vector<double> D_L = final_eval.minimizer.D_L;
  for (std::size_t u = 0; u < users; ++u)
    D_L[u] = opts.allow_local ? std::clamp(D_L[u], 0.0, sc.max_local_bits(u)) : 0.0;
  try {
    report.allocation = recover_primal(sc, D_L, eval_opts.fixed_split);
  } catch (const InfeasibleScenario& e) {
    report.status = SolveStatus::Infeasible;
    report.message = e.what();
    return report;
  }
  const double best = report.dual_value;
  report.primal_value = total_energy(sc, report.allocation);
  report.rel_gap = (report.primal_value - best) / std::max(best, 1e-15 * report.primal_value + 1e-300);
  report.kkt_residuals = kkt_residuals(sc, report.allocation, report.dual, eval_opts);
  report.status = converged ? SolveStatus::Optimal : SolveStatus::MaxIterations;
  if (!converged) report.message = "iteration limit reached before the dual bound closed";
  return report;
}

std::map<std::string, double> kkt_residuals(const Scenario& sc, const Allocation& a,
                                            const DualPoint& dual, const DualEvalOptions& opts) {
  const auto& s = sc.sys;
  const std::size_t n = sc.num_users();
  const double t_S = downlink_shared_latency(sc);
  const double energy = std::max(total_energy(sc, a), 1e-300);
  const double e_bs = bs_downlink_energy(sc, a);
  const double e_max_scale = s.E_max > 0 ? s.E_max : 1.0;
  double bits_scale = 1.0;
  for (const auto& user : sc.users) bits_scale = std::max(bits_scale, user.D_I);

  std::map<std::string, double> r{
      {"primal.latency", 0.0},          {"primal.download_window", 0.0},
      {"primal.energy_budget", 0.0},    {"primal.local_cycles", 0.0},
      {"primal.local_bits", 0.0},       {"primal.shared_split", 0.0},
      {"primal.nonnegative", 0.0},      {"dual.nonnegative", 0.0},
      {"complementarity.latency", 0.0}, {"complementarity.local_cycles", 0.0},
      {"complementarity.download_window", 0.0}, {"complementarity.energy_budget", 0.0},
      {"stationarity.lagrangian_gap", 0.0}};
  auto raise = [&r](const char* key, double v) { r[key] = std::max(r[key], v); };

  double split = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    const auto& user = sc.users[u];
    const double latency_slack = s.T_max - t_S - a.t_dl_aux - a.t_ul_shared[u] - a.t_ul_ind[u];
    const double window_slack = a.t_dl_aux - a.t_dl_ind[u];
    const double cycle_slack = a.t_local[u] * user.f_max - s.lambda0 * a.D_L[u];
    raise("primal.latency", -latency_slack / s.T_max);
    raise("primal.download_window", -window_slack / s.T_max);
    raise("primal.local_cycles", -cycle_slack / (s.T_max * user.f_max));
    raise("primal.local_bits", std::max(-a.D_L[u], a.D_L[u] - (user.D_I - sc.D_S)) / bits_scale);
    raise("primal.shared_split", -a.D_S_split[u] / bits_scale);
    raise("primal.nonnegative",
          std::max({-a.t_ul_shared[u], -a.t_ul_ind[u], -a.t_dl_ind[u], -a.t_dl_aux, -a.t_local[u]}) /
              s.T_max);
    split += a.D_S_split[u];

    raise("dual.nonnegative", -dual.beta[u] * s.T_max / energy);
    raise("dual.nonnegative", -dual.omega[u] * s.T_max * user.f_max / energy);
    raise("dual.nonnegative", -dual.sigma[u] * s.T_max / energy);

    raise("complementarity.latency", std::abs(dual.beta[u] * latency_slack) / energy);
    raise("complementarity.local_cycles", std::abs(dual.omega[u] * cycle_slack) / energy);
    raise("complementarity.download_window", std::abs(dual.sigma[u] * window_slack) / energy);
  }
  raise("primal.shared_split", std::abs(split - sc.D_S) / bits_scale);
  raise("primal.energy_budget", (e_bs - s.E_max) / e_max_scale);
  raise("dual.nonnegative", -dual.nu * e_max_scale / energy);
  raise("complementarity.energy_budget", std::abs(dual.nu * (s.E_max - e_bs)) / energy);

  if (dual.nonnegative()) {
    const auto ev = eval_dual(dual, sc, opts);
    raise("stationarity.lagrangian_gap",
          (lagrangian_value(sc, a, ev.evaluated_at) - ev.dual_value) / energy);
  }
  return r;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "iteration,dual_value,gap_bound\n";
  char buf[64];
  auto num = [&buf](double v) {
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  };
  for (const auto& row : trace) {
    if (row.feasibility_cut) continue;
    os << row.iteration << ',' << num(row.dual_value) << ',' << num(row.gap_bound) << '\n';
  }
}

}  // namespace meco
