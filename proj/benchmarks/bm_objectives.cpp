#include <benchmark/benchmark.h>

#include "lmcma/objectives.hpp"

namespace {

void BM_Evaluate(benchmark::State& state) {
    const auto id = static_cast<lmcma::FunctionId>(state.range(0));
    const std::vector<double> x(static_cast<std::size_t>(state.range(1)), 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(lmcma::evaluate(id, x));
    state.SetLabel(std::string(lmcma::function_name(id)));
}

void BM_ComplexityInjection(benchmark::State& state) {
    const auto level = static_cast<std::size_t>(state.range(0));
    const auto objective = lmcma::make_objective({lmcma::FunctionId::Sphere, 100, level, 7});
    const std::vector<double> x(100, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(objective(x));
}

}  // namespace

BENCHMARK(BM_Evaluate)->ArgsProduct({{0, 1, 2, 3}, {100, 1000}});
BENCHMARK(BM_ComplexityInjection)->DenseRange(0, 600, 200)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
