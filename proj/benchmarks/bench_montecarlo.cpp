#include <benchmark/benchmark.h>

#include "cramerlab/coupling.hpp"
#include "cramerlab/exact_engine.hpp"
#include "cramerlab/models.hpp"
#include "cramerlab/montecarlo.hpp"

using namespace cramerlab;

static void BM_SimulateTwoState(benchmark::State& state) {
  const auto model = builtin("two_state", {{"rho", 0.4}});
  const auto chains = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_W(model, 256, chains, 7));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 256);
}
BENCHMARK(BM_SimulateTwoState)->Arg(1000)->Arg(10000);

static void BM_SimulateMovingAverage(benchmark::State& state) {
  const auto model = builtin("moving_average", {{"c", 1}, {"L_trunc", 20}});
  for (auto _ : state) benchmark::DoNotOptimize(simulate_W(model, 256, 2000, 7));
  state.SetItemsProcessed(state.iterations() * 2000 * 256);
}
BENCHMARK(BM_SimulateMovingAverage);

static void BM_CoupledPairs(benchmark::State& state) {
  const auto table = distribution_of_Sn(builtin("two_state", {{"rho", 0.4}}), 1024);
  const auto transform = QuantileTransform::from_table(table);
  for (auto _ : state) benchmark::DoNotOptimize(sample_coupled_pairs(transform, 100000, 3));
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_CoupledPairs);

BENCHMARK_MAIN();
