#include <benchmark/benchmark.h>

#include "cramerlab/coefficients.hpp"
#include "cramerlab/models.hpp"

using namespace cramerlab;

static void BM_CoefficientSet(benchmark::State& state) {
  const auto model = builtin("two_state", {{"rho", 0.4}});
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(coefficient_set(model, 4096, m));
}
BENCHMARK(BM_CoefficientSet)->Arg(4)->Arg(16)->Arg(64);

static void BM_EtaCertificate(benchmark::State& state) {
  const auto model = builtin("two_state", {{"rho", 0.8}});
  const auto N = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eta_certificate(model, N));
}
BENCHMARK(BM_EtaCertificate)->Arg(100)->Arg(1000);

static void BM_Dedecker(benchmark::State& state) {
  const auto model = builtin("two_state", {{"rho", 0.4}});
  for (auto _ : state) benchmark::DoNotOptimize(check_dedecker_conditions(model, 10000));
}
BENCHMARK(BM_Dedecker);

BENCHMARK_MAIN();
