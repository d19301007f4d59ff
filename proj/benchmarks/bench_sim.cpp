#include <benchmark/benchmark.h>

#include "robustq/sim/mc_oracle.hpp"
#include "robustq/sim/reneging_sim.hpp"

using namespace robustq;

static void BM_RenegingRun(benchmark::State& state) {
  auto cfg = sim::markovian_reneging_config(static_cast<int>(state.range(0)), 50.0, 2.0, 1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim::simulate_reneging(cfg));
    ++cfg.replication;
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 100);
}
BENCHMARK(BM_RenegingRun)->Arg(10)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_TiltedRenewalRenyi(benchmark::State& state) {
  const sim::PrimitiveProcessSpec q = sim::RenewalProcess{RenewalSpec::gamma(2.0, 2.0)};
  for (auto _ : state) benchmark::DoNotOptimize(sim::mc_renyi_rate(q, 1.0, RenyiOrder::of(2.0), 50.0, 100, 1));
}
BENCHMARK(BM_TiltedRenewalRenyi)->Unit(benchmark::kMillisecond);
