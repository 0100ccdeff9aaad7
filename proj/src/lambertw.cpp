#include "meco/lambertw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "meco/model.hpp"

namespace meco {
namespace {

constexpr double kE = std::numbers::e;
// e - kE, so that 1 + e x can be formed to full precision near x = -1/e.
constexpr double kELow = 1.4456468917292502e-16;
constexpr double kInvE = 1.0 / std::numbers::e;
constexpr double kBranchTolerance = 1e-12;
constexpr int kMaxIterations = 50;

// Series about the branch point in p = sqrt(2 (1 + e x)).
double branch_series(double p) {
  return -1.0 +
         p * (1.0 + p * (-1.0 / 3.0 +
                         p * (11.0 / 72.0 +
                              p * (-43.0 / 540.0 + p * (769.0 / 17280.0 + p * (-221.0 / 8505.0))))));
}

double initial_guess(double x, double offset) {
  if (offset < 0.5) return branch_series(std::sqrt(2.0 * offset));
  if (x < 3.0) {
    const double l = std::log1p(x);
    return l * (1.0 - std::log1p(l) / (2.0 + l));
  }
  const double l1 = std::log(x);
  const double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

// (q - 1) e^q + 1, accurate for small q.
double shifted_residual_base(double q) {
  if (q > 0.5) return (q - 1.0) * std::exp(q) + 1.0;
  double term = q;  // q^n / n!
  double sum = 0.0;
  for (int n = 2; n < 40; ++n) {
    term *= q / n;
    const double add = (n - 1) * term;
    sum += add;
    if (add < 1e-18 * sum) break;
  }
  return sum;
}

}  // namespace

double lambert_w0(double x) {
  if (std::isnan(x)) throw DomainError("lambert_w0: NaN argument");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;
  const double offset = std::fma(kE, x, 1.0) + kELow * x;  // 1 + e x
  if (offset <= 0.0) {
    if (x >= -kInvE - kBranchTolerance) return -1.0;
    throw DomainError("lambert_w0: argument below -1/e");
  }
  double w = initial_guess(x, offset);
  if (offset < 0.5 && std::sqrt(2.0 * offset) < 1e-3) return w;

  if (x > 1e250) {
    // w + ln w = ln x, Newton in log form to avoid overflow in e^w.
    const double lx = std::log(x);
    for (int it = 0; it < kMaxIterations; ++it) {
      const double step = (w + std::log(w) - lx) / (1.0 + 1.0 / w);
      w -= step;
      if (std::abs(step) <= 4e-16 * std::abs(w)) return w;
    }
    throw DomainError("lambert_w0: no convergence");
  }

  // Near the branch point the derivative e^w (w + 1) is tiny and rounding in
  // f keeps the step from settling; stop once f is at its rounding floor.
  const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
  double best_w = w, best_f = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kMaxIterations; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (std::abs(f) < best_f) best_f = std::abs(f), best_w = w;
    if (f == 0.0 || (offset < 0.5 && std::abs(f) <= floor)) return w;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double next = w - f / denom;
    if (!std::isfinite(next)) break;
    const double step = next - w;
    w = next;
    if (std::abs(step) <= 4e-16 * (1.0 + std::abs(w))) return w;
  }
  if (best_f <= 1e3 * floor) return best_w;
  throw DomainError("lambert_w0: no convergence");
}

double lambert_w0_shifted(double p) {
  if (std::isnan(p)) throw DomainError("lambert_w0_shifted: NaN argument");
  if (p <= 0.0) return 1.0 + lambert_w0((p - 1.0) * kInvE);
  if (p >= 0.5) return 1.0 + lambert_w0((p - 1.0) * kInvE);
  // Newton on (q - 1) e^q + 1 = p from the right of the root; the function
  // is convex and increasing on q > 0 so the iterates decrease monotonically.
  double q = std::sqrt(2.0 * p);
  for (int it = 0; it < kMaxIterations; ++it) {
    const double step = (shifted_residual_base(q) - p) / (q * std::exp(q));
    q -= step;
    if (std::abs(step) <= 2e-16 * q) return q;
  }
  return q;
}

double rate_from_dual(double price, double gain, double noise, double bandwidth) {
  if (price == 0.0) return 0.0;
  return bandwidth / std::numbers::ln2 * lambert_w0_shifted(price * gain / noise);
}

double invert_power_tradeoff(double y, double noise, double bandwidth) {
  return bandwidth / std::numbers::ln2 * lambert_w0_shifted(-y / noise);
}

}  // namespace meco
