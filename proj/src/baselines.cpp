#include "meco/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace meco {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;

template <class F>
double golden_min(F&& f, double a, double b, double rel_tol) {
  double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
  double fc = f(c), fd = f(d);
  const double tol = rel_tol * std::max(std::abs(a), std::abs(b));
  for (int k = 0; k < 200 && b - a > tol; ++k) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

BaselineResult from_report(BaselineKind kind, const Scenario& accounting, const SolveReport& r) {
  BaselineResult out;
  out.kind = kind;
  out.status = r.status;
  out.accounting = accounting;
  out.iterations = r.iterations;
  out.message = r.message;
  if (r.status != SolveStatus::Infeasible) {
    out.allocation = r.allocation;
    out.energy = r.primal_value;
    out.rel_gap = r.rel_gap;
  }
  return out;
}

Scenario without_shared(const Scenario& sc) {
  Scenario s = sc;
  s.D_S = 0.0;
  return s;
}

// Restricted problem of the equal-time scheme.
class EqualTimeProblem {
 public:
  EqualTimeProblem(const Scenario& sc, bool full_copy)
      : sc_(sc),
        n_(sc.num_users()),
        w_ul_(sc.W_ul_user()),
        w_dl_(sc.W_dl_user()),
        n_ul_(sc.noise_ul()),
        n_dl_(sc.noise_dl()),
        shared_bits_(full_copy ? sc.D_S : sc.D_S / static_cast<double>(sc.num_users())),
        budget_(sc.sys.T_max - downlink_shared_latency(sc)),
        D_L_(n_) {}

  double budget() const { return budget_; }
  double shared_bits() const { return shared_bits_; }
  const std::vector<double>& local_bits() const { return D_L_; }

  // Energy for window tau and shared slot c_S; leaves the local shares in
  // local_bits(). +inf when infeasible.
  double energy(double tau, double c_S) {
    const double c_I = budget_ - tau - c_S;
    if (shared_bits_ > 0 && !(c_S > 0)) return kInf;
    if (c_I < 0 || tau < 0) return kInf;
    if (!assign_local(tau, c_I)) return kInf;
    double e = 0.0;
    for (std::size_t u = 0; u < n_; ++u) {
      const auto& user = sc_.users[u];
      const double b = remaining(u, D_L_[u]);
      e += local_energy(sc_, u, D_L_[u], sc_.sys.T_max) +
           transmit_energy(c_S, shared_bits_, user.h_sq, w_ul_, n_ul_) +
           transmit_energy(c_I, b, user.h_sq, w_ul_, n_ul_) +
           user.rho_dl * (downlink_shared_time(sc_, u) + tau);
    }
    return e;
  }

  // Smallest window for which full local shares fit the BS budget.
  double min_window() const {
    double bs = 0.0;
    for (std::size_t u = 0; u < n_; ++u) bs += remaining(u, sc_.max_local_bits(u));
    if (bs <= 0) return 0.0;
    auto fits = [&](double tau) {
      double e = 0.0;
      for (std::size_t u = 0; u < n_; ++u)
        e += transmit_energy(tau, sc_.sys.a0 * remaining(u, sc_.max_local_bits(u)), sc_.users[u].g_sq,
                             w_dl_, n_dl_);
      return e <= sc_.sys.E_max;
    };
    if (!(budget_ > 0) || !fits(budget_)) return kInf;
    double lo = 0.0, hi = budget_;
    for (int k = 0; k < 200 && hi - lo > 1e-15 * budget_; ++k) {
      const double mid = 0.5 * (lo + hi);
      (fits(mid) ? hi : lo) = mid;
    }
    return hi;
  }

 private:
  double remaining(std::size_t u, double D_L) const { return std::max(0.0, sc_.individual_bits(u, D_L)); }

  // Minimiser over D_L of local + uplink + mu * BS energy for one user.
  double best_local(std::size_t u, double tau, double c_I, double mu) const {
    const auto& s = sc_.sys;
    const auto& user = sc_.users[u];
    const double top = sc_.max_local_bits(u);
    const double all = user.D_I - sc_.D_S;
    if (!(c_I > 0) || !(tau > 0)) return top;  // feasibility decided by the caller
    const double k3 = 3.0 * s.kappa0 * s.lambda0 * s.lambda0 * s.lambda0 / (s.T_max * s.T_max);
    auto slope = [&](double D) {
      const double b = all - D;
      return k3 * D * D - f_power_derivative(b / c_I, w_ul_, n_ul_) / user.h_sq -
             mu * s.a0 * f_power_derivative(s.a0 * b / tau, w_dl_, n_dl_) / user.g_sq;
    };
    if (slope(0.0) >= 0) return 0.0;
    if (slope(top) <= 0) return top;
    double lo = 0.0, hi = top;
    for (int k = 0; k < 200 && hi - lo > 1e-14 * top; ++k) {
      const double mid = 0.5 * (lo + hi);
      (slope(mid) > 0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  }

  double bs_energy(double tau) const {
    double e = 0.0;
    for (std::size_t u = 0; u < n_; ++u)
      e += transmit_energy(tau, sc_.sys.a0 * remaining(u, D_L_[u]), sc_.users[u].g_sq, w_dl_, n_dl_);
    return e;
  }

  bool assign_local(double tau, double c_I) {
    auto fill = [&](double mu) {
      for (std::size_t u = 0; u < n_; ++u) D_L_[u] = best_local(u, tau, c_I, mu);
      if (!(c_I > 0) || !(tau > 0))
        for (std::size_t u = 0; u < n_; ++u)
          if (remaining(u, D_L_[u]) > 0) return false;
      return true;
    };
    if (!fill(0.0)) return false;
    if (bs_energy(tau) <= sc_.sys.E_max) return true;
    double hi = 1.0;
    for (int k = 0; k < 400; ++k, hi *= 4.0) {
      fill(hi);
      if (bs_energy(tau) <= sc_.sys.E_max) break;
    }
    if (bs_energy(tau) > sc_.sys.E_max) return false;
    double lo = 0.0;
    for (int k = 0; k < 200 && hi - lo > 1e-13 * hi; ++k) {
      const double mid = 0.5 * (lo + hi);
      fill(mid);
      (bs_energy(tau) > sc_.sys.E_max ? lo : hi) = mid;
    }
    fill(hi);
    return true;
  }

  const Scenario& sc_;
  std::size_t n_;
  double w_ul_, w_dl_, n_ul_, n_dl_;
  double shared_bits_;
  double budget_;
  std::vector<double> D_L_;
};

}  // namespace

std::string to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::LocalOnly:
      return "local_only";
    case BaselineKind::NoSharedAwareness:
      return "no_shared";
    case BaselineKind::FullOffloadOnly:
      return "full_offload";
    case BaselineKind::EqualTime:
      return "equal_time";
  }
  return "unknown";
}

BaselineResult local_only(const Scenario& sc) {
  validate(sc);
  BaselineResult out;
  out.kind = BaselineKind::LocalOnly;
  out.accounting = without_shared(sc);
  const std::size_t n = sc.num_users();
  for (std::size_t u = 0; u < n; ++u) {
    const auto& user = sc.users[u];
    if (sc.sys.lambda0 * user.D_I > sc.sys.T_max * user.f_max) {
      out.message = "user " + std::to_string(u) + " cannot finish its cycles locally within T_max";
      return out;
    }
  }
  Allocation a(n);
  for (std::size_t u = 0; u < n; ++u) {
    a.D_L[u] = sc.users[u].D_I;
    a.t_local[u] = sc.sys.T_max;
  }
  out.energy = total_energy(out.accounting, a);
  out.allocation = std::move(a);
  out.status = SolveStatus::Optimal;
  return out;
}

BaselineResult no_shared_awareness(const Scenario& sc, const SolverOptions& opts) {
  // The shared bits still have to be uploaded, so the local share stays capped
  // at D_I - D_S. With t_local = T_max, f_max enters only through the cycle
  // cap, so lowering it enforces exactly that bound (floored to keep f_max
  // positive when D_S = D_I).
  Scenario folded = without_shared(sc);
  for (auto& user : folded.users)
    user.f_max = std::min(user.f_max, std::max(1e-12 * user.f_max,
                                               sc.sys.lambda0 * (user.D_I - sc.D_S) / sc.sys.T_max));
  return from_report(BaselineKind::NoSharedAwareness, folded, solve(folded, opts));
}

BaselineResult full_offload_only(const Scenario& sc, const SolverOptions& opts) {
  SolverOptions o = opts;
  o.allow_local = false;
  return from_report(BaselineKind::FullOffloadOnly, sc, solve(sc, o));
}

BaselineResult equal_time(const Scenario& sc, bool full_copy) {
  validate(sc);
  BaselineResult out;
  out.kind = BaselineKind::EqualTime;
  out.accounting = sc;
  EqualTimeProblem p(sc, full_copy);
  const double B = p.budget();
  const double tau_lo = p.min_window();
  if (!std::isfinite(tau_lo) || !(B > 0)) {
    out.message = "no common download window meets the BS budget";
    return out;
  }
  constexpr double kTol = 1e-10;
  const bool has_shared = p.shared_bits() > 0;

  auto best_shared_slot = [&](double tau) {
    const double room = B - tau;
    if (!has_shared || !(room > 0)) return 0.0;
    return golden_min([&](double c) { return p.energy(tau, c); }, 0.0, room, kTol);
  };
  auto inner = [&](double tau) { return p.energy(tau, best_shared_slot(tau)); };

  double tau = tau_lo;
  bool any_download = false;
  for (std::size_t u = 0; u < sc.num_users(); ++u)
    any_download = any_download || sc.individual_bits(u, 0.0) > 0;
  if (any_download && tau_lo < B) {
    tau = golden_min(inner, tau_lo, B, kTol);
    if (inner(tau_lo) < inner(tau)) tau = tau_lo;
  }
  const double c_S = best_shared_slot(tau);
  const double e = p.energy(tau, c_S);
  if (!std::isfinite(e)) {
    out.message = "equal-time restriction has no feasible point";
    return out;
  }

  const std::size_t n = sc.num_users();
  Allocation a(n);
  for (std::size_t u = 0; u < n; ++u) {
    a.D_L[u] = p.local_bits()[u];
    a.D_S_split[u] = p.shared_bits();
    a.t_local[u] = sc.sys.T_max;
    a.t_ul_shared[u] = has_shared ? c_S : 0.0;
    a.t_ul_ind[u] = B - tau - c_S;
    a.t_dl_ind[u] = tau;
  }
  a.t_dl_aux = tau;
  out.energy = total_energy(sc, a);
  out.allocation = std::move(a);
  out.status = SolveStatus::Optimal;
  return out;
}

BaselineResult run_baseline(BaselineKind kind, const Scenario& sc, const BaselineOptions& opts) {
  switch (kind) {
    case BaselineKind::LocalOnly:
      return local_only(sc);
    case BaselineKind::NoSharedAwareness:
      return no_shared_awareness(sc, opts.solver);
    case BaselineKind::FullOffloadOnly:
      return full_offload_only(sc, opts.solver);
    case BaselineKind::EqualTime:
      return equal_time(sc, opts.equal_time_full_copy);
  }
  throw std::invalid_argument("run_baseline: unknown kind");
}

}  // namespace meco
