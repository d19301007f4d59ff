#include <benchmark/benchmark.h>

#include "robustq/reneging.hpp"
#include "robustq/renewal.hpp"
#include "robustq/scheduling.hpp"

using namespace robustq;

static void BM_G2Gamma(benchmark::State& state) {
  const auto spec = RenewalSpec::gamma(2.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(renewal_bounds(spec, 2.0));
}
BENCHMARK(BM_G2Gamma)->Unit(benchmark::kMillisecond);

static void BM_G2PhaseType(benchmark::State& state) {
  const auto spec = RenewalSpec::phase_type({0.5, 0.5}, {1.5, 3.0});
  for (auto _ : state) benchmark::DoNotOptimize(renewal_bounds(spec, 2.0));
}
BENCHMARK(BM_G2PhaseType)->Unit(benchmark::kMillisecond);

static void BM_RobustRsBound(benchmark::State& state) {
  SchedulingInstance inst;
  inst.arrival_rates = {1, 1.5, 1.8, 2, 2};
  inst.service_rates = {8, 10, 12, 9, 14};
  inst.costs = {0.3, 0.2, 0.2, 0.1, 0.2};
  inst = inst.with_symmetric_envelopes(0.65);
  inst.beta = 5.0;
  for (auto _ : state) benchmark::DoNotOptimize(robust_rs_bound(inst));
}
BENCHMARK(BM_RobustRsBound)->Unit(benchmark::kMicrosecond);

static void BM_RenegingBoundRow(benchmark::State& state) {
  const RenegingInstance inst{2.0, 1.0, 1.0, 1.0};
  const auto cols = standard_figure3_columns(0.3, GammaBox{1, 1.1, 1, 1.1}, GammaBox{1, 1.5, 1, 1.5});
  for (auto _ : state) benchmark::DoNotOptimize(figure3_data(inst, cols, {2.0}, 1));
}
BENCHMARK(BM_RenegingBoundRow)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
