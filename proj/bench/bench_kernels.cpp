// Grid oracle: OpenMP search against the single-threaded reference, plus a
// full sweep in both modes.

#include <benchmark/benchmark.h>

#include "meco/config.hpp"
#include "meco/oracle.hpp"
#include "meco/sweep.hpp"

namespace {

meco::Scenario two_users() {
  meco::Scenario sc;
  sc.users.resize(2);
  sc.users[0].h_sq = sc.users[0].g_sq = meco::pathloss_gain(0.12);
  sc.users[1].h_sq = sc.users[1].g_sq = meco::pathloss_gain(0.31);
  sc.D_S = 3e3;
  return sc;
}

void BM_GridParallel(benchmark::State& st) {
  const auto sc = two_users();
  for (auto _ : st) benchmark::DoNotOptimize(meco::grid_solve(sc, static_cast<std::size_t>(st.range(0))));
}

void BM_GridSerial(benchmark::State& st) {
  const auto sc = two_users();
  for (auto _ : st) benchmark::DoNotOptimize(meco::grid_solve_reference(sc, static_cast<std::size_t>(st.range(0))));
}

meco::ScenarioConfig small_sweep() {
  return meco::parse_config(
      "users: {count: 4}\n"
      "schemes: [proposed, full_offload]\n"
      "sweep: {variable: T_max, from: 10ms, to: 40ms, step: 10ms}\n");
}

void BM_SweepParallel(benchmark::State& st) {
  const auto cfg = small_sweep();
  for (auto _ : st) benchmark::DoNotOptimize(meco::run_sweep(cfg, {false, true}));
}

void BM_SweepSerial(benchmark::State& st) {
  const auto cfg = small_sweep();
  for (auto _ : st) benchmark::DoNotOptimize(meco::run_sweep(cfg, {false, false}));
}

}  // namespace

BENCHMARK(BM_GridParallel)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridSerial)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
