#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "meco/config.hpp"

using namespace meco;
using doctest::Approx;

namespace {

std::string error_of(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("empty file gives the defaults") {
  const auto cfg = parse_config("");
  CHECK(cfg.num_users == 10);
  CHECK(cfg.shared_fraction == 0.3);
  CHECK(cfg.sys.T_max == 0.01);
  CHECK(cfg.sys.E_max == 1e-3);
  CHECK(cfg.seed == 1);
  CHECK(cfg.schemes.size() == 5);
  CHECK(cfg.sweep.variable == SweepVariable::None);
  const Scenario sc = build_scenario(cfg);
  CHECK(sc.num_users() == 10);
  CHECK(sc.D_S == Approx(3e3));
  for (const auto& u : sc.users) {
    CHECK(u.distance_km >= 0.05);
    CHECK(u.distance_km <= 0.5);
    CHECK(u.h_sq == pathloss_gain(u.distance_km));
  }
}

TEST_CASE("quantities with units") {
  CHECK(parse_quantity("10MHz", Quantity::Frequency) == 1e7);
  CHECK(parse_quantity("10 MHz", Quantity::Frequency) == 1e7);
  CHECK(parse_quantity("2.5GHz", Quantity::Frequency) == 2.5e9);
  CHECK(parse_quantity("10kbits", Quantity::Bits) == 1e4);
  CHECK(parse_quantity("10ms", Quantity::Time) == Approx(0.01).epsilon(1e-15));
  CHECK(parse_quantity("30dBm", Quantity::Power) == Approx(1.0).epsilon(1e-14));
  CHECK(parse_quantity("1mJ", Quantity::Energy) == Approx(1e-3).epsilon(1e-15));
  CHECK(parse_quantity("-169dBm/Hz", Quantity::NoiseDensity) == -169.0);
  CHECK(parse_quantity("120m", Quantity::Distance) == Approx(0.12).epsilon(1e-15));
  CHECK(parse_quantity("-100dB", Quantity::Gain) == Approx(1e-10).epsilon(1e-14));
  CHECK(parse_quantity("0.25", Quantity::Time) == 0.25);
  CHECK_THROWS_AS(parse_quantity("10MHz", Quantity::Time), ConfigError);
  CHECK_THROWS_AS(parse_quantity("fast", Quantity::Frequency), ConfigError);
}

TEST_CASE("invalid values are rejected with a location") {
  const auto frac = error_of("shared_fraction: 1.2\n");
  CHECK(frac.find("shared_fraction") != std::string::npos);
  CHECK(frac.find("line 1") != std::string::npos);

  const auto unknown = error_of("seed: 3\nsystem:\n  bandwith_ul: 10MHz\n");
  CHECK(unknown.find("bandwith_ul") != std::string::npos);
  CHECK(unknown.find("line 3") != std::string::npos);

  CHECK_FALSE(error_of("schemes: [proposed, magic]\n").empty());
  CHECK_FALSE(error_of("users: {count: 0}\n").empty());
  CHECK_FALSE(error_of("system: {T_max: -1ms}\n").empty());
  CHECK_FALSE(error_of("system: [1, 2\n").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/file.yaml"), ConfigError);
}

TEST_CASE("sweeps") {
  const auto t = parse_config("sweep: {variable: T_max}\n");
  REQUIRE(t.sweep.variable == SweepVariable::T_max);
  REQUIRE(t.sweep.values.size() == 10);
  CHECK(t.sweep.values.front() == 0.01);
  CHECK(t.sweep.values[2] == 0.03);
  CHECK(t.sweep.values.back() == 0.1);

  const auto f = parse_config("sweep: {variable: shared_fraction}\n");
  REQUIRE(f.sweep.values.size() == 10);
  CHECK(f.sweep.values.front() == 0.0);
  CHECK(f.sweep.values.back() == 0.9);

  const auto listed = parse_config("sweep: {variable: shared_fraction, values: [0, 0.5]}\n");
  CHECK(listed.sweep.values == std::vector<double>{0.0, 0.5});
  const Scenario half = build_scenario(listed, 0.5);
  CHECK(half.D_S == Approx(5e3));
  // placement does not depend on the sweep value
  CHECK(half.users[3].distance_km == build_scenario(listed, 0.0).users[3].distance_km);

  const auto ranged = parse_config("sweep: {variable: T_max, from: 20ms, to: 40ms, step: 10ms}\n");
  CHECK(ranged.sweep.values == std::vector<double>{0.02, 0.03, 0.04});
  CHECK(build_scenario(ranged, 0.03).sys.T_max == 0.03);

  CHECK(make_range(0.1, 0.3, 0.1) == std::vector<double>{0.1, 0.2, 0.3});
}

TEST_CASE("explicit users") {
  const auto cfg = parse_config(
      "users:\n"
      "  D_I: 20kbits\n"
      "  list:\n"
      "    - {distance: 120m}\n"
      "    - {h_sq: -120dB, g_sq: -110dB, D_I: 30kbits}\n"
      "shared_fraction: 0.5\n");
  const Scenario sc = build_scenario(cfg);
  REQUIRE(sc.num_users() == 2);
  CHECK(sc.users[0].distance_km == Approx(0.12));
  CHECK(sc.users[0].D_I == 2e4);
  CHECK(sc.users[1].h_sq == Approx(1e-12));
  CHECK(sc.users[1].g_sq == Approx(1e-11));
  CHECK(sc.users[1].D_I == 3e4);
  CHECK(sc.D_S == Approx(1e4));
}

TEST_CASE("seed controls placement") {
  const Scenario a = build_scenario(parse_config("seed: 1\n"));
  const Scenario b = build_scenario(parse_config("seed: 1\n"));
  const Scenario c = build_scenario(parse_config("seed: 2\n"));
  CHECK(a.users[0].distance_km == b.users[0].distance_km);
  CHECK(a.users[0].distance_km != c.users[0].distance_km);
}
