#include <benchmark/benchmark.h>

#include <random>

#include "lmcma/implicit_cholesky.hpp"
#include "lmcma/random.hpp"

namespace {

lmcma::Vector gaussian(std::size_t n, lmcma::Rng& rng) {
    std::normal_distribution<double> normal;
    lmcma::Vector x(n);
    for (auto& xi : x) xi = normal(rng);
    return x;
}

lmcma::PairArchive filled_archive(std::size_t n, std::size_t m, lmcma::Rng& rng) {
    lmcma::PairArchive archive(n, m, 0.05);
    for (std::size_t k = 0; k < m; ++k) {
        archive.insert(gaussian(n, rng), static_cast<std::int64_t>((k + 1) * n), static_cast<std::int64_t>(n));
    }
    return archive;
}

void BM_Multiply(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto m = static_cast<std::size_t>(state.range(1));
    lmcma::Rng rng(1);
    const auto archive = filled_archive(n, m, rng);
    const auto z = gaussian(n, rng);
    for (auto _ : state) benchmark::DoNotOptimize(archive.multiply(z));
    state.SetComplexityN(static_cast<benchmark::IterationCount>(n * m));
}

void BM_MultiplyInverse(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto m = static_cast<std::size_t>(state.range(1));
    lmcma::Rng rng(2);
    const auto archive = filled_archive(n, m, rng);
    const auto z = gaussian(n, rng);
    for (auto _ : state) benchmark::DoNotOptimize(archive.multiply_inverse(z));
    state.SetComplexityN(static_cast<benchmark::IterationCount>(n * m));
}

void BM_InsertWithEviction(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto m = static_cast<std::size_t>(state.range(1));
    lmcma::Rng rng(3);
    auto archive = filled_archive(n, m, rng);
    std::int64_t stamp = static_cast<std::int64_t>((m + 1) * n);
    const auto p = gaussian(n, rng);
    for (auto _ : state) {
        stamp += static_cast<std::int64_t>(n);
        archive.insert(p, stamp, static_cast<std::int64_t>(n));
    }
}

}  // namespace

BENCHMARK(BM_Multiply)->ArgsProduct({{100, 1000, 10000}, {4, 17}})->Complexity(benchmark::oN);
BENCHMARK(BM_MultiplyInverse)->ArgsProduct({{100, 1000, 10000}, {4, 17}})->Complexity(benchmark::oN);
BENCHMARK(BM_InsertWithEviction)->ArgsProduct({{100, 1000}, {17}});
