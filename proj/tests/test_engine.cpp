#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "doctest.h"
#include "lmcma/engine.hpp"
#include "lmcma/error.hpp"

using namespace lmcma;

namespace {

RunConfig sphere_config(std::size_t n, Mode mode, std::uint64_t seed) {
    RunConfig config;
    config.objective = {FunctionId::Sphere, n, 0, seed};
    config.params = default_params(n);
    config.mode = mode;
    config.seed = seed;
    config.thresholds = {1.0, 3e-2, 1e-5, 3e-7, 1e-10};
    return config;
}

std::vector<double> trace_fitness(const RunResult& result) {
    std::vector<double> values;
    for (const auto& p : result.trace) values.push_back(p.best_fitness);
    return values;
}

void check_trace_invariants(const RunResult& result, const RunConfig& config) {
    for (std::size_t i = 1; i < result.trace.size(); ++i) {
        CHECK(result.trace[i].best_fitness < result.trace[i - 1].best_fitness);
        CHECK(result.trace[i].time_s >= result.trace[i - 1].time_s);
        CHECK(result.trace[i].evals > result.trace[i - 1].evals);
    }
    REQUIRE(result.threshold_times.size() == config.thresholds.size());
    std::optional<double> previous;
    for (std::size_t k = 0; k < config.thresholds.size(); ++k) {
        const auto& t = result.threshold_times[k];
        if (t && previous) CHECK(*t >= *previous);
        if (k > 0 && t) CHECK(result.threshold_times[k - 1].has_value());
        if (t) {
            for (const auto& p : result.trace) {
                if (p.best_fitness <= config.thresholds[k]) CHECK(*t <= p.time_s);
            }
        }
        previous = t;
    }
}

}  // namespace

TEST_CASE("termination criteria") {
    auto config = sphere_config(4, Mode::Async, 1);
    auto state = initial_state(config.params, Vector(4, 0.0));

    state.best_fitness = 5e-11;
    CHECK(check_termination(state, config) == TerminalReason::Optimum);

    state.best_fitness = 1.0;
    state.evals = 1'000'000;
    CHECK(check_termination(state, config) == TerminalReason::Budget);

    state.evals = 10;
    state.sigma = 1e-21;
    CHECK(check_termination(state, config) == TerminalReason::Stagnation);

    config.mode = Mode::Generational;
    CHECK_FALSE(check_termination(state, config).has_value());

    config.mode = Mode::Async;
    state.sigma = 1.0;
    CHECK_FALSE(check_termination(state, config).has_value());

    // Priority: Optimum > Budget > Stagnation.
    state.best_fitness = 1e-12;
    state.evals = 2'000'000;
    state.sigma = 1e-30;
    CHECK(check_termination(state, config) == TerminalReason::Optimum);
    state.best_fitness = 1.0;
    CHECK(check_termination(state, config) == TerminalReason::Budget);
}

TEST_CASE("zero budget returns immediately") {
    for (auto mode : {Mode::Async, Mode::Generational}) {
        auto config = sphere_config(5, mode, 2);
        config.eval_budget = 0;
        const auto result = run(config);
        CHECK(result.terminal_reason == TerminalReason::Budget);
        CHECK(result.evals_used == 0);
        CHECK(result.trace.empty());
    }
}

TEST_CASE("sigma below the floor stagnates on the first update") {
    auto config = sphere_config(5, Mode::Async, 3);
    config.params.sigma0 = 1e-21;
    const auto result = run_async(config);
    CHECK(result.terminal_reason == TerminalReason::Stagnation);
    CHECK(result.evals_used == 1);
}

TEST_CASE("single-worker async replay is identical") {
    auto config = sphere_config(5, Mode::Async, 4);
    config.workers = 1;
    const auto a = run_async(config);
    const auto b = run_async(config);
    CHECK(a.terminal_reason == TerminalReason::Optimum);
    CHECK(trace_fitness(a) == trace_fitness(b));
    CHECK(a.evals_used == b.evals_used);
    check_trace_invariants(a, config);
}

TEST_CASE("generational budget is checked after each generation") {
    auto config = sphere_config(10, Mode::Generational, 5);
    config.eval_budget = static_cast<std::int64_t>(config.params.lambda) - 3;
    const auto result = run_generational(config);
    CHECK(result.terminal_reason == TerminalReason::Budget);
    CHECK(result.evals_used == static_cast<std::int64_t>(config.params.lambda));
}

TEST_CASE("generational traces do not depend on worker count") {
    auto config = sphere_config(8, Mode::Generational, 6);
    config.eval_budget = 3000;
    config.workers = 1;
    const auto one = run_generational(config);
    config.workers = 4;
    const auto four = run_generational(config);
    CHECK(trace_fitness(one) == trace_fitness(four));
    CHECK(one.evals_used == four.evals_used);
    CHECK(one.best_fitness == four.best_fitness);
}

TEST_CASE("generational sphere n=10 reaches the optimum") {
    int solved = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto config = sphere_config(10, Mode::Generational, seed);
        config.eval_budget = 100'000;
        const auto result = run_generational(config);
        if (result.terminal_reason == TerminalReason::Optimum) ++solved;
        check_trace_invariants(result, config);
    }
    CHECK(solved >= 18);
}

TEST_CASE("objective failures abort with a distinct reason") {
    std::atomic<int> calls{0};
    const Objective failing = [&](std::span<const double> x) {
        if (++calls > 50) throw std::runtime_error("sensor offline");
        return sphere(x);
    };
    for (auto mode : {Mode::Async, Mode::Generational}) {
        calls = 0;
        auto config = sphere_config(6, mode, 7);
        config.workers = 3;
        const auto result = run(config, failing);
        CHECK(result.terminal_reason == TerminalReason::Error);
        CHECK(result.error_message == "sensor offline");
    }
}

TEST_CASE("progress observer sees every update") {
    auto config = sphere_config(4, Mode::Async, 8);
    config.eval_budget = 500;
    std::int64_t last = 0;
    int calls = 0;
    config.on_progress = [&](const Progress& p) {
        CHECK(p.evals == last + 1);
        CHECK(p.sigma > 0.0);
        last = p.evals;
        ++calls;
    };
    const auto result = run_async(config);
    CHECK(calls == result.evals_used);
}

TEST_CASE("eight-worker stress: exclusive region and bounded overshoot") {
    auto config = sphere_config(10, Mode::Async, 9);
    config.workers = 8;
    config.eval_budget = 100'000;
    config.fitness_tol = -1.0;  // never stop early
    config.sigma_floor = 0.0;
    const auto result = run_async(config);
    CHECK(result.terminal_reason == TerminalReason::Budget);
    CHECK(result.max_region_occupancy == 1);
    CHECK(result.evals_used >= config.eval_budget);
    CHECK(result.evals_used <= config.eval_budget + static_cast<std::int64_t>(config.workers));
    check_trace_invariants(result, config);
}

TEST_CASE("snapshots are isolated from later updates") {
    const auto params = default_params(3);
    auto state = initial_state(params, Vector{1, 2, 3});
    const auto before = take_snapshot(state);
    const auto again = take_snapshot(state);
    CHECK(before.version == again.version);
    CHECK(before.mean == again.mean);
    CHECK(before.archive == again.archive);

    Candidate c;
    c.x = {0.0, 0.0, 0.0};
    c.z = c.x;
    c.fitness = 0.5;
    steady_state_accept(state, params, c);
    CHECK(state.version > before.version);
    CHECK(before.mean == Vector{1, 2, 3});
    CHECK(before.sigma == params.sigma0);
}

TEST_CASE("concurrent snapshots never observe torn state") {
    auto params = default_params(6);
    params.n_steps = 3;
    auto state = initial_state(params, Vector(6, 1.0));
    std::mutex region;
    std::map<std::uint64_t, double> digest_at_version;

    auto digest = [](const Vector& mean, double sigma, const PairArchive& archive) {
        double h = sigma;
        for (std::size_t i = 0; i < mean.size(); ++i) h = h * 1.000001 + mean[i] * (i + 1);
        for (const auto& e : archive.entries()) h += e.b + static_cast<double>(e.stamp);
        return h;
    };
    digest_at_version[state.version] = digest(state.mean, state.sigma, *state.archive);

    std::atomic<int> mismatches{0};
    std::vector<std::pair<std::uint64_t, double>> observed;
    std::mutex observed_mutex;
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            Rng rng(100 + t);
            for (int k = 0; k < 2500; ++k) {
                Snapshot snapshot;
                {
                    std::lock_guard lock(region);
                    snapshot = take_snapshot(state);
                }
                const double seen = digest(snapshot.mean, snapshot.sigma, *snapshot.archive);
                {
                    std::lock_guard lock(observed_mutex);
                    observed.emplace_back(snapshot.version, seen);
                }
                auto candidate = sample_candidate(snapshot, rng);
                candidate.fitness = sphere(candidate.x);
                std::lock_guard lock(region);
                steady_state_accept(state, params, candidate);
                digest_at_version[state.version] =
                    digest(state.mean, state.sigma, *state.archive);
            }
        });
    }
    for (auto& thread : threads) thread.join();
    CHECK(observed.size() == 10'000);
    for (const auto& [version, seen] : observed) {
        auto it = digest_at_version.find(version);
        REQUIRE(it != digest_at_version.end());
        if (it->second != seen) ++mismatches;
    }
    CHECK(mismatches == 0);
}

TEST_CASE("config validation") {
    auto config = sphere_config(4, Mode::Async, 1);
    config.thresholds = {1.0, 1.0};
    CHECK_THROWS_AS(run(config), ContractError);
    config = sphere_config(4, Mode::Async, 1);
    config.workers = 0;
    CHECK_THROWS_AS(run(config), ContractError);
    config = sphere_config(4, Mode::Generational, 1);
    CHECK_THROWS_AS(run_async(config), ContractError);
    CHECK(parse_mode("ASYNC") == Mode::Async);
    CHECK(parse_reason("stagnation") == TerminalReason::Stagnation);
    CHECK_THROWS_AS(parse_mode("batch"), ContractError);
}
