#include "meco/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <omp.h>

namespace meco {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_small(const Scenario& sc, const char* who) {
  validate(sc);
  if (sc.num_users() > kMaxOracleUsers)
    throw std::invalid_argument(std::string(who) + ": at most 3 users supported");
}

// Root z >= 0 of (z - 1) e^z + 1 = c, by Newton from the right (the left side
// is convex and increasing on z >= 0).
double stationary_z(double c) {
  if (!(c > 0)) return 0.0;
  double z = 1.0 + std::log1p(c);
  for (int k = 0; k < 100; ++k) {
    const double ez = std::exp(z);
    const double step = (z * ez - std::expm1(z) - c) / (z * ez);
    z -= step;
    if (!(z > 0)) return 0.0;
    if (std::abs(step) <= 1e-15 * z) break;
  }
  return z;
}

struct Links {
  double w_ul, w_dl, n_ul, n_dl, budget;
  explicit Links(const Scenario& sc)
      : w_ul(sc.W_ul_user()),
        w_dl(sc.W_dl_user()),
        n_ul(sc.noise_ul()),
        n_dl(sc.noise_dl()),
        budget(sc.sys.T_max - downlink_shared_latency(sc)) {}
};

// Download slots inside window tau: each user's slot minimises
// rho t + mu e_u(t), the price mu is set by bisection so the BS budget holds.
double download_cost(const Scenario& sc, const Links& l, std::span<const double> down, double tau,
                     std::vector<double>& t, double& mu_hint) {
  const std::size_t n = sc.num_users();
  bool any = false;
  for (double d : down) any = any || d > 0;
  std::fill(t.begin(), t.end(), 0.0);
  if (!any) return 0.0;
  if (!(tau > 0)) return kInf;

  auto bs_energy = [&](double mu) {
    double e = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (down[u] <= 0) continue;
      const auto& user = sc.users[u];
      const double z = stationary_z(user.rho_dl * user.g_sq / (mu * l.n_dl));
      const double rate = z * l.w_dl / std::numbers::ln2;
      t[u] = rate > 0 ? std::min(tau, down[u] / rate) : tau;
      e += transmit_energy(t[u], down[u], user.g_sq, l.w_dl, l.n_dl);
    }
    return e;
  };
  // Bracket the price in log space, then TOMS 748 on log(mu).
  const double cap = sc.sys.E_max;
  auto excess = [&](double log_mu) { return bs_energy(std::exp(log_mu)) - cap; };
  double hi = std::log(mu_hint > 0 ? mu_hint : 1.0 / std::max(cap, 1e-300));
  double f_hi = excess(hi);
  int guard = 0;
  while (f_hi > 0) {
    hi += 2.0;
    f_hi = excess(hi);
    if (++guard > 400) return kInf;
  }
  double lo = hi, f_lo = f_hi;
  bool bracketed = false;
  for (int k = 0; k < 400; ++k) {
    lo -= 2.0;
    f_lo = excess(lo);
    if (f_lo > 0) {
      bracketed = true;
      break;
    }
    hi = lo;
    f_hi = f_lo;
  }
  if (bracketed) {
    std::uintmax_t iters = 100;
    const auto root = boost::math::tools::toms748_solve(excess, lo, hi, f_lo, f_hi,
                                                        boost::math::tools::eps_tolerance<double>(45), iters);
    hi = root.second;
  }
  mu_hint = std::exp(hi);
  bs_energy(mu_hint);
  double cost = 0.0;
  for (std::size_t u = 0; u < n; ++u) cost += sc.users[u].rho_dl * t[u];
  return cost;
}

double uplink_energy(const Scenario& sc, const Links& l, std::span<const double> up, double A) {
  double e = 0.0;
  for (std::size_t u = 0; u < sc.num_users(); ++u) {
    if (up[u] <= 0) continue;
    if (!(A > 0)) return kInf;
    e += transmit_energy(A, up[u], sc.users[u].h_sq, l.w_ul, l.n_ul);
  }
  return e;
}

// Compositions of `total` into `parts` nonnegative integers, lexicographic.
void compositions(std::size_t total, std::size_t parts, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
  if (parts == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (std::size_t k = 0; k <= total; ++k) {
    cur.push_back(k);
    compositions(total - k, parts - 1, cur, out);
    cur.pop_back();
  }
}

class Grid {
 public:
  Grid(const Scenario& sc, std::size_t res) : sc_(sc), res_(res), n_(sc.num_users()) {
    if (res == 0) throw std::invalid_argument("grid_solve: resolution must be positive");
    for (std::size_t u = 0; u < n_; ++u) {
      const double top = sc.max_local_bits(u);
      local_points_.push_back(top > 0 ? res + 1 : 1);
      local_top_.push_back(top);
    }
    std::vector<std::size_t> cur;
    if (sc.D_S > 0 && n_ > 1)
      compositions(res, n_, cur, splits_);
    else
      splits_.push_back(std::vector<std::size_t>(n_, 0));
    size_ = splits_.size();
    for (auto p : local_points_) size_ *= p;
  }

  std::size_t size() const { return size_; }

  std::vector<std::size_t> resolution() const {
    auto r = local_points_;
    r.push_back(splits_.size());
    return r;
  }

  double evaluate(std::size_t k, Allocation* a) const {
    const std::size_t s = k % splits_.size();
    std::size_t rest = k / splits_.size();
    std::vector<double> D_L(n_), split(n_, 0.0), up(n_), down(n_);
    for (std::size_t u = 0; u < n_; ++u) {
      const std::size_t i = rest % local_points_[u];
      rest /= local_points_[u];
      D_L[u] = local_points_[u] > 1 ? local_top_[u] * static_cast<double>(i) / static_cast<double>(res_) : 0.0;
      if (sc_.D_S > 0)
        split[u] = n_ > 1 ? sc_.D_S * static_cast<double>(splits_[s][u]) / static_cast<double>(res_) : sc_.D_S;
    }
    double local = 0.0;
    for (std::size_t u = 0; u < n_; ++u) {
      const double b = std::max(0.0, sc_.individual_bits(u, D_L[u]));
      up[u] = b + split[u];
      down[u] = sc_.sys.a0 * b;
      local += local_energy(sc_, u, D_L[u], sc_.sys.T_max);
    }
    const double e = optimal_time_energy(sc_, up, down, a);
    if (a) {
      a->D_L = D_L;
      a->D_S_split = split;
      for (std::size_t u = 0; u < n_; ++u) {
        a->t_local[u] = sc_.sys.T_max;
        if (up[u] > 0) {
          const double A = a->t_ul_ind[u];
          a->t_ul_shared[u] = A * split[u] / up[u];
          a->t_ul_ind[u] = A - a->t_ul_shared[u];
        }
      }
    }
    return local + e;
  }

 private:
  const Scenario& sc_;
  std::size_t res_, n_;
  std::vector<std::size_t> local_points_;
  std::vector<double> local_top_;
  std::vector<std::vector<std::size_t>> splits_;
  std::size_t size_ = 0;
};

OracleResult finish_grid(const Scenario& sc, const Grid& grid, std::size_t best_k) {
  OracleResult out;
  out.method = OracleMethod::GridSearch;
  out.grid_resolution = grid.resolution();
  out.iterations = grid.size();
  if (best_k == static_cast<std::size_t>(-1)) return out;
  Allocation a(sc.num_users());
  grid.evaluate(best_k, &a);
  out.best_allocation = std::move(a);
  out.best_value = total_energy(sc, out.best_allocation);
  return out;
}

bool better(double v, std::size_t k, double best, std::size_t best_k) {
  return v < best || (v == best && k < best_k);
}

// Scaled decision vector: per user [ts, tu, td, DL, DS] then tau; times over
// T_max, bits over the largest D_I.
class Layout {
 public:
  explicit Layout(const Scenario& sc) : n(sc.num_users()), T(sc.sys.T_max), bits(1.0) {
    for (const auto& user : sc.users) bits = std::max(bits, user.D_I);
  }
  std::size_t size() const { return 5 * n + 1; }
  static constexpr std::size_t kTs = 0, kTu = 1, kTd = 2, kDL = 3, kDS = 4;
  std::size_t at(std::size_t u, std::size_t field) const { return 5 * u + field; }
  std::size_t tau() const { return 5 * n; }

  std::vector<double> pack(const Allocation& a) const {
    std::vector<double> x(size());
    for (std::size_t u = 0; u < n; ++u) {
      x[at(u, kTs)] = a.t_ul_shared[u] / T;
      x[at(u, kTu)] = a.t_ul_ind[u] / T;
      x[at(u, kTd)] = a.t_dl_ind[u] / T;
      x[at(u, kDL)] = a.D_L[u] / bits;
      x[at(u, kDS)] = a.D_S_split[u] / bits;
    }
    x[tau()] = a.t_dl_aux / T;
    return x;
  }

  Allocation unpack(const std::vector<double>& x) const {
    Allocation a(n);
    for (std::size_t u = 0; u < n; ++u) {
      a.t_ul_shared[u] = x[at(u, kTs)] * T;
      a.t_ul_ind[u] = x[at(u, kTu)] * T;
      a.t_dl_ind[u] = x[at(u, kTd)] * T;
      a.D_L[u] = x[at(u, kDL)] * bits;
      a.D_S_split[u] = x[at(u, kDS)] * bits;
      a.t_local[u] = T;
    }
    a.t_dl_aux = x[tau()] * T;
    return a;
  }

  std::size_t n;
  double T, bits;
};

// Euclidean projection onto {x >= 0, sum x = total}.
void project_simplex(std::vector<double>& v, double total) {
  if (v.empty()) return;
  std::vector<double> s = v;
  std::sort(s.begin(), s.end(), std::greater<>());
  double run = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    run += s[i];
    const double t = (run - total) / static_cast<double>(i + 1);
    if (i + 1 == s.size() || s[i + 1] <= t) {
      theta = t;
      break;
    }
  }
  for (double& x : v) x = std::max(0.0, x - theta);
}

double f_gap(double r, double W, double N0) {
  // f(r) - r f'(r) = N0 [expm1(y) - y e^y], y = r ln2 / W.
  const double y = r * std::numbers::ln2 / W;
  if (std::abs(y) > 0.5) return N0 * (std::expm1(y) - y * std::exp(y));
  // small |y|: the difference cancels, sum -(n-1) y^n / n! instead
  double term = y, sum = 0.0;
  for (int n = 2; n < 40; ++n) {
    term *= y / n;
    const double add = (n - 1) * term;
    sum += add;
    if (std::abs(add) <= 1e-17 * std::abs(sum)) break;
  }
  return -N0 * sum;
}

// Root of an increasing function bracketed by [lo, hi]; with `upper` the
// bracket end on the nonnegative side is returned.
template <class G>
double increasing_root(G&& g, double lo, double hi, bool upper = false) {
  auto safe = [&](double x) {
    const double v = g(x);
    if (std::isnan(v)) return -std::numeric_limits<double>::max();
    return std::clamp(v, -std::numeric_limits<double>::max(), std::numeric_limits<double>::max());
  };
  const double f_lo = safe(lo), f_hi = safe(hi);
  if (f_lo >= 0) return lo;
  if (f_hi <= 0) return hi;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(safe, lo, hi, f_lo, f_hi,
                                                   boost::math::tools::eps_tolerance<double>(50), iters);
  if (upper) return safe(r.first) >= 0 ? r.first : r.second;
  return 0.5 * (r.first + r.second);
}

class Projector {
 public:
  explicit Projector(const Scenario& sc) : sc_(sc), l_(sc), lay_(sc), warm_(sc.num_users(), {0.0, 0.0}) {}

  const Layout& layout() const { return lay_; }

  // BS energy of user u at scaled (td, DL).
  double energy(std::size_t u, double td, double DL) const {
    const double b = sc_.sys.a0 * (sc_.users[u].D_I - sc_.D_S - DL * lay_.bits);
    const double t = td * lay_.T;
    if (b == 0.0) return 0.0;
    if (!(t > 0)) return b > 0 ? kInf : 0.0;
    const double r = b / t;
    return t * f_power(r, l_.w_dl, l_.n_dl) / sc_.users[u].g_sq;
  }

  std::vector<double> project(const std::vector<double>& y, double tol, std::size_t max_cycles) {
    const std::size_t n = lay_.n;
    const double budget = l_.budget / lay_.T;
    std::vector<double> x = y;
    const std::size_t sets = 2 * n + 3;
    std::vector<std::vector<double>> q(sets, std::vector<double>(x.size(), 0.0));
    std::vector<double> z(x.size()), prev;

    auto apply = [&](std::size_t s, std::vector<double>& v) {
      if (s < n) {  // ts + tu + tau <= budget
        const std::size_t u = s;
        const double viol = v[lay_.at(u, 0)] + v[lay_.at(u, 1)] + v[lay_.tau()] - budget;
        if (viol > 0) {
          v[lay_.at(u, 0)] -= viol / 3;
          v[lay_.at(u, 1)] -= viol / 3;
          v[lay_.tau()] -= viol / 3;
        }
      } else if (s < 2 * n) {  // td <= tau
        const std::size_t u = s - n;
        const double viol = v[lay_.at(u, 2)] - v[lay_.tau()];
        if (viol > 0) {
          v[lay_.at(u, 2)] -= viol / 2;
          v[lay_.tau()] += viol / 2;
        }
      } else if (s == 2 * n) {  // box
        for (std::size_t u = 0; u < n; ++u) {
          for (std::size_t f : {Layout::kTs, Layout::kTu, Layout::kTd})
            v[lay_.at(u, f)] = std::max(0.0, v[lay_.at(u, f)]);
          v[lay_.at(u, Layout::kDL)] =
              std::clamp(v[lay_.at(u, Layout::kDL)], 0.0, sc_.max_local_bits(u) / lay_.bits);
        }
        v[lay_.tau()] = std::clamp(v[lay_.tau()], 0.0, std::max(budget, 0.0));
      } else if (s == 2 * n + 1) {  // shared split simplex
        std::vector<double> d(n);
        for (std::size_t u = 0; u < n; ++u) d[u] = v[lay_.at(u, Layout::kDS)];
        project_simplex(d, sc_.D_S / lay_.bits);
        for (std::size_t u = 0; u < n; ++u) v[lay_.at(u, Layout::kDS)] = d[u];
      } else {
        project_energy(v);
      }
    };

    for (std::size_t cycle = 0; cycle < max_cycles; ++cycle) {
      prev = x;
      for (std::size_t s = 0; s < sets; ++s) {
        for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + q[s][i];
        x = z;
        apply(s, x);
        for (std::size_t i = 0; i < x.size(); ++i) q[s][i] = z[i] - x[i];
      }
      double move = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) move = std::max(move, std::abs(x[i] - prev[i]));
      if (move <= tol) break;
    }
    return x;
  }

 private:
  // Prox of mu e_u at (y_td, y_DL). For fixed td the optimal DL solves a
  // monotone equation; the remaining function of td is convex with derivative
  // (td - y_td) + mu T e_t (envelope theorem), also monotone.
  std::pair<double, double> prox(std::size_t u, double y_td, double y_DL, double mu) {
    if (auto z = prox_newton(u, y_td, y_DL, mu)) {
      warm_[u] = *z;
      return *z;
    }
    return prox_nested(u, y_td, y_DL, mu);
  }

  // Damped Newton on 1/2 |z - y|^2 + mu e_u(z). e_u is the perspective
  // t f(b / t) / g, whose Hessian in (t, b) is f''(r) / (g t) [r^2, -r; -r, 1].
  std::optional<std::pair<double, double>> prox_newton(std::size_t u, double y_td, double y_DL, double mu) const {
    const auto& user = sc_.users[u];
    const double T = lay_.T, Db = lay_.bits, a0 = sc_.sys.a0, g = user.g_sq;
    const double c = a0 * (user.D_I - sc_.D_S);
    const double k_ln = std::numbers::ln2 / l_.w_dl;
    auto F = [&](double td, double DL) {
      const double e = energy(u, td, DL);
      return 0.5 * ((td - y_td) * (td - y_td) + (DL - y_DL) * (DL - y_DL)) + mu * e;
    };
    double td = warm_[u].first > 0 ? warm_[u].first : std::max(y_td, 0.1);
    double DL = warm_[u].first > 0 ? warm_[u].second : y_DL;
    double f = F(td, DL);
    if (!std::isfinite(f)) {
      td = std::max(y_td, 1.0);
      DL = y_DL;
      f = F(td, DL);
      if (!std::isfinite(f)) return std::nullopt;
    }
    for (int it = 0; it < 100; ++it) {
      const double t = td * T, r = (c - a0 * Db * DL) / t;
      const double fpp = l_.n_dl * k_ln * k_ln * std::exp2(r / l_.w_dl);
      const double k = mu * fpp / (g * t);
      const double g1 = (td - y_td) + mu * T * f_gap(r, l_.w_dl, l_.n_dl) / g;
      const double g2 = (DL - y_DL) - mu * a0 * Db * f_power_derivative(r, l_.w_dl, l_.n_dl) / g;
      const double h11 = 1.0 + k * T * T * r * r, h22 = 1.0 + k * a0 * a0 * Db * Db, h12 = k * T * a0 * Db * r;
      const double det = h11 * h22 - h12 * h12;
      const double d1 = -(h22 * g1 - h12 * g2) / det, d2 = -(h11 * g2 - h12 * g1) / det;
      if (!std::isfinite(d1) || !std::isfinite(d2)) return std::nullopt;
      const double decrement = -(g1 * d1 + g2 * d2);
      // F is 1-strongly convex, so |z - z*| <= |grad F|.
      if (std::hypot(g1, g2) <= 1e-12) return std::pair{td, DL};
      double a = 1.0;
      while (td + a * d1 <= 0) a *= 0.5;
      bool moved = false;
      for (int k2 = 0; k2 < 60; ++k2, a *= 0.5) {
        const double ft = F(td + a * d1, DL + a * d2);
        if (ft <= f - 1e-4 * a * decrement) {
          if (td + a * d1 == td && DL + a * d2 == DL) return std::pair{td, DL};
          td += a * d1;
          DL += a * d2;
          f = ft;
          moved = true;
          break;
        }
      }
      if (!moved) {
        // rounding floor: accept if the gradient is already negligible
        if (std::hypot(g1, g2) <= 1e-10) return std::pair{td, DL};
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  std::pair<double, double> prox_nested(std::size_t u, double y_td, double y_DL, double mu) const {
    const auto& user = sc_.users[u];
    const double T = lay_.T, Db = lay_.bits, a0 = sc_.sys.a0;
    const double c = a0 * (user.D_I - sc_.D_S);
    const double g = user.g_sq;
    auto rate = [&](double td, double DL) { return (c - a0 * Db * DL) / (td * T); };

    auto best_DL = [&](double td) {
      auto phi = [&](double DL) {
        return (DL - y_DL) - mu * a0 * Db * f_power_derivative(rate(td, DL), l_.w_dl, l_.n_dl) / g;
      };
      const double lo = y_DL;
      const double hi = std::max(y_DL, c / (a0 * Db)) + mu * a0 * Db * f_power_derivative(0.0, l_.w_dl, l_.n_dl) / g;
      return increasing_root(phi, lo, hi);
    };
    auto slope = [&](double td) {
      const double DL = best_DL(td);
      return (td - y_td) + mu * T * f_gap(rate(td, DL), l_.w_dl, l_.n_dl) / g;
    };

    double lo = y_td > 0 ? y_td : 1e-12;
    while (slope(lo) > 0 && lo > 1e-300) lo *= 0.5;
    double hi = std::max(2.0 * lo, 1e-6);
    while (slope(hi) < 0) hi *= 2.0;
    const double td = increasing_root(slope, lo, hi);
    return {td, best_DL(td)};
  }

  void project_energy(std::vector<double>& v) {
    const std::size_t n = lay_.n;
    const double cap = sc_.sys.E_max;
    std::vector<double> y_td(n), y_DL(n);
    for (std::size_t u = 0; u < n; ++u) {
      y_td[u] = v[lay_.at(u, Layout::kTd)];
      y_DL[u] = v[lay_.at(u, Layout::kDL)];
    }
    auto total = [&](double mu, bool write) {
      double e = 0.0;
      for (std::size_t u = 0; u < n; ++u) {
        auto [td, DL] = mu > 0 ? prox(u, y_td[u], y_DL[u], mu) : std::pair{y_td[u], y_DL[u]};
        e += energy(u, td, DL);
        if (write) {
          v[lay_.at(u, Layout::kTd)] = td;
          v[lay_.at(u, Layout::kDL)] = DL;
        }
      }
      return e;
    };
    if (total(0.0, false) <= cap) return;
    // Energy at the prox point decreases in mu; solve in log(mu).
    auto excess = [&](double log_mu) { return cap - total(std::exp(log_mu), false); };
    double hi = std::log(mu_hint_ > 0 ? mu_hint_ : 1.0 / std::max(cap, 1e-300));
    while (excess(hi) < 0) hi += 2.0;
    double lo = hi - 2.0;
    while (excess(lo) >= 0) {
      hi = lo;
      lo -= 2.0;
    }
    const double root = increasing_root(excess, lo, hi, true);
    mu_hint_ = std::exp(root);
    total(mu_hint_, true);
  }

  const Scenario& sc_;
  Links l_;
  Layout lay_;
  double mu_hint_ = 0.0;
  std::vector<std::pair<double, double>> warm_;  // last prox point per user
};


}  // namespace

double optimal_time_energy(const Scenario& sc, std::span<const double> up, std::span<const double> down,
                           Allocation* a) {
  const std::size_t n = sc.num_users();
  const Links l(sc);
  bool any_up = false, any_down = false;
  for (std::size_t u = 0; u < n; ++u) {
    any_up = any_up || up[u] > 0;
    any_down = any_down || down[u] > 0;
  }
  double shared_decode = 0.0;
  for (std::size_t u = 0; u < n; ++u) shared_decode += sc.users[u].rho_dl * downlink_shared_time(sc, u);
  const double B = l.budget;
  if ((any_up || any_down) && !(B > 0)) return kInf;

  std::vector<double> t(n, 0.0);
  double tau = 0.0, mu_hint = 0.0;
  if (any_down) {
    auto fits = [&](double w) {
      double e = 0.0;
      for (std::size_t u = 0; u < n; ++u) e += transmit_energy(w, down[u], sc.users[u].g_sq, l.w_dl, l.n_dl);
      return e <= sc.sys.E_max;
    };
    if (!fits(B)) return kInf;
    double lo = 0.0, hi = B;
    for (int k = 0; k < 200 && hi - lo > 1e-15 * B; ++k) {
      const double mid = 0.5 * (lo + hi);
      (fits(mid) ? hi : lo) = mid;
    }
    auto cost = [&](double w) {
      return uplink_energy(sc, l, up, B - w) + download_cost(sc, l, down, w, t, mu_hint);
    };
    // The cost is convex in the window.
    std::uintmax_t iters = 200;
    const auto [w, fw] = boost::math::tools::brent_find_minima(cost, hi, B, 40, iters);
    tau = w;
    if (cost(hi) < fw) tau = hi;
  }
  const double A = B - tau;
  const double e = uplink_energy(sc, l, up, A) + download_cost(sc, l, down, tau, t, mu_hint) + shared_decode;
  if (!std::isfinite(e)) return kInf;
  if (a) {
    for (std::size_t u = 0; u < n; ++u) {
      a->t_ul_shared[u] = 0.0;
      a->t_ul_ind[u] = up[u] > 0 ? A : 0.0;
      a->t_dl_ind[u] = t[u];
    }
    a->t_dl_aux = tau;
  }
  return e;
}

OracleResult grid_solve(const Scenario& sc, std::size_t resolution) {
  require_small(sc, "grid_solve");
  const Grid grid(sc, resolution);
  const auto total = static_cast<long long>(grid.size());
  double best = kInf;
  std::size_t best_k = static_cast<std::size_t>(-1);
#pragma omp parallel
  {
    double mine = kInf;
    std::size_t mine_k = static_cast<std::size_t>(-1);
#pragma omp for schedule(dynamic, 16)
    for (long long k = 0; k < total; ++k) {
      const double v = grid.evaluate(static_cast<std::size_t>(k), nullptr);
      if (better(v, static_cast<std::size_t>(k), mine, mine_k)) {
        mine = v;
        mine_k = static_cast<std::size_t>(k);
      }
    }
#pragma omp critical
    if (better(mine, mine_k, best, best_k)) {
      best = mine;
      best_k = mine_k;
    }
  }
  return finish_grid(sc, grid, best_k);
}

OracleResult grid_solve_reference(const Scenario& sc, std::size_t resolution) {
  require_small(sc, "grid_solve_reference");
  const Grid grid(sc, resolution);
  double best = kInf;
  std::size_t best_k = static_cast<std::size_t>(-1);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = grid.evaluate(k, nullptr);
    if (better(v, k, best, best_k)) {
      best = v;
      best_k = k;
    }
  }
  return finish_grid(sc, grid, best_k);
}

Allocation energy_gradient(const Scenario& sc, const Allocation& a) {
  const std::size_t n = sc.num_users();
  const auto& s = sc.sys;
  const double w = sc.W_ul_user(), N0 = sc.noise_ul();
  Allocation g(n);
  for (std::size_t u = 0; u < n; ++u) {
    const auto& user = sc.users[u];
    const double h = user.h_sq;
    // Shared uplink (ts/h) f(DS/ts): d/dts = [f(r) - r f'(r)]/h, d/dDS = f'(r)/h.
    const double rs = a.t_ul_shared[u] > 0 ? a.D_S_split[u] / a.t_ul_shared[u] : 0.0;
    g.t_ul_shared[u] = f_gap(rs, w, N0) / h;
    g.D_S_split[u] = f_power_derivative(rs, w, N0) / h;
    // Individual uplink (tu/h) f(b/tu), b = D_I - D_S - D_L.
    const double b = sc.individual_bits(u, a.D_L[u]);
    const double ri = a.t_ul_ind[u] > 0 ? b / a.t_ul_ind[u] : 0.0;
    g.t_ul_ind[u] = f_gap(ri, w, N0) / h;
    // Local kappa0 (lambda0 D_L)^3 / t^2.
    const double cyc = s.lambda0 * a.D_L[u];
    const double tl = a.t_local[u];
    g.D_L[u] = 3.0 * s.kappa0 * s.lambda0 * cyc * cyc / (tl * tl) - f_power_derivative(ri, w, N0) / h;
    g.t_local[u] = -2.0 * s.kappa0 * cyc * cyc * cyc / (tl * tl * tl);
    // Decoding rho (t_S + t_u).
    g.t_dl_ind[u] = user.rho_dl;
  }
  g.t_dl_aux = 0.0;
  return g;
}

Allocation project_feasible(const Scenario& sc, const Allocation& a, double tol, std::size_t max_cycles) {
  validate(sc);
  Projector p(sc);
  return p.layout().unpack(p.project(p.layout().pack(a), tol, max_cycles));
}

OracleResult projected_gradient_solve(const Scenario& sc, const ProjectedGradientOptions& opts) {
  require_small(sc, "projected_gradient_solve");
  const std::size_t n = sc.num_users();
  Projector proj(sc);
  const Layout& lay = proj.layout();
  const double B = sc.sys.T_max - downlink_shared_latency(sc);
  if (!(B > 0)) throw DomainError("projected_gradient_solve: no strictly feasible start");

  auto value = [&](const std::vector<double>& x) {
    const double e = total_energy(sc, lay.unpack(x));
    return std::isnan(e) ? kInf : e;
  };

  std::vector<double> x;
  double fx = kInf;
  if (opts.start.size() == n) {
    Allocation a = opts.start;
    for (std::size_t u = 0; u < n; ++u) a.t_local[u] = sc.sys.T_max;
    x = proj.project(lay.pack(a), opts.projection_tol, opts.max_projection_cycles);
    fx = value(x);
  }
  // Interior start: half the budget each way, half the local capacity.
  for (double local : {0.5, 0.9, 1.0}) {
    if (std::isfinite(fx)) break;
    Allocation a(n);
    a.t_dl_aux = 0.5 * B;
    for (std::size_t u = 0; u < n; ++u) {
      a.t_ul_shared[u] = sc.D_S > 0 ? 0.25 * B : 0.0;
      a.t_ul_ind[u] = sc.D_S > 0 ? 0.25 * B : 0.5 * B;
      a.t_dl_ind[u] = 0.5 * B;
      a.D_L[u] = local * sc.max_local_bits(u);
      a.D_S_split[u] = sc.D_S / static_cast<double>(n);
      a.t_local[u] = sc.sys.T_max;
    }
    x = proj.project(lay.pack(a), opts.projection_tol, opts.max_projection_cycles);
    fx = value(x);
    if (std::isfinite(fx)) break;
  }
  if (!std::isfinite(fx)) throw DomainError("projected_gradient_solve: no strictly feasible start");

  OracleResult out;
  out.method = OracleMethod::ProjectedGradient;
  const double T = lay.T, Db = lay.bits;
  std::vector<double> grad(x.size()), trial(x.size());
  double step = -1.0;
  std::size_t it = 0;
  std::vector<double> history;
  for (; it < opts.max_iters; ++it) {
    const Allocation g = energy_gradient(sc, lay.unpack(x));
    for (std::size_t u = 0; u < n; ++u) {
      grad[lay.at(u, Layout::kTs)] = g.t_ul_shared[u] * T;
      grad[lay.at(u, Layout::kTu)] = g.t_ul_ind[u] * T;
      grad[lay.at(u, Layout::kTd)] = g.t_dl_ind[u] * T;
      grad[lay.at(u, Layout::kDL)] = g.D_L[u] * Db;
      grad[lay.at(u, Layout::kDS)] = g.D_S_split[u] * Db;
    }
    grad[lay.tau()] = 0.0;
    double gmax = 0.0;
    for (double v : grad) gmax = std::max(gmax, std::abs(v));
    if (!(gmax > 0)) break;
    if (step < 0) step = opts.initial_step / gmax;

    bool accepted = false, stalled = false;
    for (int k = 0; k < 80; ++k) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - step * grad[i];
      trial = proj.project(trial, opts.projection_tol, opts.max_projection_cycles);
      double move = 0.0, decrease = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        move = std::max(move, std::abs(trial[i] - x[i]));
        decrease += grad[i] * (trial[i] - x[i]);
      }
      if (move <= opts.tol) {
        stalled = true;
        break;
      }
      const double ft = value(trial);
      if (ft <= fx + opts.armijo * decrease) {
        x = trial;
        fx = ft;
        accepted = true;
        step *= opts.grow;
        break;
      }
      step *= opts.backtrack;
    }
    if (!accepted || stalled) break;
    history.push_back(fx);
    if (history.size() > opts.window && history[history.size() - 1 - opts.window] - fx <= opts.f_tol * std::abs(fx))
      break;
  }
  out.iterations = it;
  out.best_allocation = lay.unpack(x);
  out.best_value = fx;
  return out;
}

std::vector<double> lp_split_oracle(std::span<const double> delta, double D_S, std::size_t steps) {
  const std::size_t n = delta.size();
  if (n == 0) return {};
  if (n > kMaxOracleUsers) throw std::invalid_argument("lp_split_oracle: at most 3 users supported");
  if (steps == 0) throw std::invalid_argument("lp_split_oracle: steps must be positive");
  std::vector<std::vector<std::size_t>> grid;
  std::vector<std::size_t> cur;
  compositions(steps, n, cur, grid);
  double best = kInf;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double v = 0.0;
    for (std::size_t u = 0; u < n; ++u)
      if (grid[i][u] > 0) v += delta[u] * static_cast<double>(grid[i][u]);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  std::vector<double> split(n);
  for (std::size_t u = 0; u < n; ++u)
    split[u] = D_S * static_cast<double>(grid[best_i][u]) / static_cast<double>(steps);
  return split;
}

}  // namespace meco
