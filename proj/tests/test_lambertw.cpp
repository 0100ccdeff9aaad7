#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/lambert_w.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "meco/lambertw.hpp"
#include "meco/model.hpp"
#include "support.hpp"

using namespace meco;
using doctest::Approx;

TEST_CASE("W0 at special points") {
  CHECK(lambert_w0(0.0) == 0.0);
  CHECK(lambert_w0(std::numbers::e) == Approx(1.0).epsilon(1e-15));
  CHECK(lambert_w0(-1.0 / std::numbers::e) == Approx(-1.0).epsilon(1e-7));
  CHECK(lambert_w0(-std::exp(-1.0)) == Approx(-1.0).epsilon(1e-7));
  CHECK_THROWS_AS(lambert_w0(-0.5), DomainError);
  CHECK_THROWS_AS(lambert_w0(std::nan("")), DomainError);
}

TEST_CASE("W0(10) against bisection") {
  double lo = 0.0, hi = 10.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::exp(mid) - 10.0 > 0 ? hi : lo) = mid;
  }
  const double w = lambert_w0(10.0);
  CHECK(w == Approx(0.5 * (lo + hi)).epsilon(1e-14));
  CHECK(std::abs(w * std::exp(w) - 10.0) <= 1e-13 * 10.0);
}

TEST_CASE("W0 agrees with Boost.Math") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 2000; ++k) {
    const double x = testing::log_uniform(rng, 1e-12, 1e12) * (k % 3 == 0 ? -1.0 : 1.0);
    if (x < -std::exp(-1.0)) continue;
    const double ref = boost::math::lambert_w0(x);
    CHECK(lambert_w0(x) == Approx(ref).epsilon(1e-13).scale(1.0));
  }
  // approach to the branch point
  for (double d = 1e-3; d > 1e-15; d /= 3.0) {
    const double x = -std::exp(-1.0) + d;
    CHECK(lambert_w0(x) == Approx(boost::math::lambert_w0(x)).epsilon(1e-7));
  }
}

TEST_CASE("shifted W0 near the branch point") {
  for (double p : {1e-14, 1e-10, 1e-6, 1e-3, 0.1, 0.49, 0.5, 2.0, 1e6}) {
    const double q = lambert_w0_shifted(p);
    // (q - 1) e^q + 1 = p, with the left side expanded when q is small
    const double lhs = q < 1e-2 ? q * q / 2 + q * q * q / 3 + q * q * q * q / 8 : (q - 1) * std::exp(q) + 1;
    CHECK(lhs == Approx(p).epsilon(1e-9));
  }
  CHECK(lambert_w0_shifted(0.0) == Approx(0.0).scale(1.0).epsilon(1e-7));
}

TEST_CASE("rate from a dual price") {
  const double N0 = 1.2589e-14, W = 1e6, gain = 1e-10;
  CHECK(rate_from_dual(0.0, gain, N0, W) == 0.0);
  CHECK(rate_from_dual(N0 / gain, gain, N0, W) == Approx(W / std::numbers::ln2).epsilon(1e-14));

  std::mt19937_64 rng(22);
  for (int k = 0; k < 200; ++k) {
    const double price = testing::log_uniform(rng, 1e-8, 1e2) * N0 / gain;
    const double r = rate_from_dual(price, gain, N0, W);
    const double z = r / W * std::numbers::ln2;
    const double gap = N0 * (std::expm1(z) - z * std::exp(z));  // f(r) - r f'(r)
    CHECK(gap == Approx(-price * gain).epsilon(1e-9));
  }
}

TEST_CASE("inverting the power trade-off") {
  const double N0 = 1e-14, W = 2e6;
  for (double r : {1e3, 1e5, 1e6, 3e6, 4e7}) {
    const double z = r / W * std::numbers::ln2;
    const double y = N0 * (std::expm1(z) - z * std::exp(z));
    CHECK(invert_power_tradeoff(y, N0, W) == Approx(r).epsilon(1e-9));
  }
}
