#include <benchmark/benchmark.h>

#include "cramerlab/exact_engine.hpp"
#include "cramerlab/models.hpp"

using namespace cramerlab;

static void BM_DistributionTwoState(benchmark::State& state) {
  const auto model = builtin("two_state", {{"rho", 0.4}});
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(distribution_of_Sn(model, n));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DistributionTwoState)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

static void BM_DistributionRademacher(benchmark::State& state) {
  const auto model = builtin("rademacher");
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(distribution_of_Sn(model, n));
}
BENCHMARK(BM_DistributionRademacher)->RangeMultiplier(4)->Range(256, 16384);

static void BM_KsExact(benchmark::State& state) {
  const auto table = distribution_of_Sn(builtin("two_state", {{"rho", 0.4}}), static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ks_distance_exact(table));
}
BENCHMARK(BM_KsExact)->Arg(1024)->Arg(4096);

static void BM_BlockMoments(benchmark::State& state) {
  const auto model = builtin("two_state", {{"rho", 0.4}});
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(conditional_block_moments(model, m));
}
BENCHMARK(BM_BlockMoments)->Arg(4)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
