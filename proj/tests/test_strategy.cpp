#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "lmcma/error.hpp"
#include "lmcma/objectives.hpp"
#include "lmcma/strategy.hpp"

using namespace lmcma;

namespace {

AlgorithmParams small_params(std::size_t n, std::size_t pool) {
    auto params = default_params(n);
    params.ss_pool = pool;
    return params;
}

Candidate scored(std::size_t n, double fitness, double fill = 0.0) {
    Candidate c;
    c.z.assign(n, 0.0);
    c.x.assign(n, fill);
    c.fitness = fitness;
    return c;
}

}  // namespace

TEST_CASE("default parameters") {
    const auto p100 = default_params(100);
    CHECK(p100.lambda == 17);
    CHECK(p100.mu == 8);
    CHECK(p100.m_pairs == 17);
    CHECK(p100.ss_pool == 17);
    CHECK(p100.n_steps == 100);
    CHECK(p100.c1 == doctest::Approx(0.021667906533553168));
    CHECK(p100.c_c == doctest::Approx(1.0 / 17.0));
    CHECK(p100.d_sigma == doctest::Approx(6.0));
    CHECK(p100.p_target == doctest::Approx(0.2));
    CHECK(p100.sigma0 == doctest::Approx(0.3));
    p100.validate();

    const auto p2 = default_params(2);
    CHECK(p2.lambda == 6);
    CHECK(p2.mu == 3);

    CHECK(default_params(10, 10.0).sigma0 == doctest::Approx(3.0));
    CHECK_THROWS_AS(default_params(1), ContractError);
}

TEST_CASE("recombination weights") {
    const auto w2 = recombination_weights(2);
    CHECK(w2[0] == doctest::Approx(0.7304227103091852).epsilon(1e-14));
    CHECK(w2[1] == doctest::Approx(0.26957728969081496).epsilon(1e-14));

    for (std::size_t mu : {1u, 3u, 8u, 50u}) {
        const auto w = recombination_weights(mu);
        CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::is_sorted(w.rbegin(), w.rend()));
        CHECK(effective_mass(w) >= 1.0);
        CHECK(effective_mass(w) <= static_cast<double>(mu) + 1e-12);
    }
}

TEST_CASE("parameter validation") {
    auto params = default_params(10);
    params.c1 = 1.0;
    CHECK_THROWS_AS(params.validate(), ContractError);
    params = default_params(10);
    params.weights = {0.4, 0.6, 0.0};
    CHECK_THROWS_AS(params.validate(), ContractError);
    params = default_params(10);
    params.mu_w += 0.5;
    CHECK_THROWS_AS(params.validate(), ContractError);
    params = default_params(10);
    params.sigma0 = 0.0;
    CHECK_THROWS_AS(params.validate(), ContractError);
}

TEST_CASE("sampling") {
    SUBCASE("identity factor, unit sigma, zero mean gives x = z") {
        auto state = initial_state(default_params(4), Vector(4, 0.0));
        state.sigma = 1.0;
        Rng rng(1);
        const auto c = sample_candidate(take_snapshot(state), rng);
        CHECK(c.x == c.z);
    }
    SUBCASE("affine case") {
        auto state = initial_state(default_params(4), Vector(4, 1.0));
        state.sigma = 0.5;
        Rng rng(2);
        const auto c = sample_candidate(take_snapshot(state), rng);
        for (std::size_t i = 0; i < 4; ++i) CHECK(c.x[i] == 1.0 + 0.5 * c.z[i]);
    }
    SUBCASE("fixed seed is deterministic and x is reproducible from z") {
        const auto params = default_params(6);
        auto state = initial_state(params, Vector(6, 0.3));
        auto archive = std::make_shared<PairArchive>(*state.archive);
        archive->insert(Vector{1, 2, 3, 4, 5, 6}, 1, 1);
        state.archive = archive;
        const auto snapshot = take_snapshot(state);
        Rng a(42);
        Rng b(42);
        const auto ca = sample_candidate(snapshot, a);
        const auto cb = sample_candidate(snapshot, b);
        CHECK(ca.z == cb.z);
        CHECK(ca.x == cb.x);
        CHECK(candidate_point(snapshot, ca.z) == ca.x);
    }
    SUBCASE("draws are standard normal") {
        auto state = initial_state(default_params(2), Vector(2, 0.0));
        const auto snapshot = take_snapshot(state);
        Rng rng(5);
        double sum = 0.0, sum_sq = 0.0;
        const int draws = 20'000;
        for (int k = 0; k < draws; ++k) {
            const auto c = sample_candidate(snapshot, rng);
            for (double z : c.z) {
                sum += z;
                sum_sq += z * z;
            }
        }
        const double count = 2.0 * draws;
        CHECK(std::abs(sum / count) < 0.02);
        CHECK(std::abs(sum_sq / count - 1.0) < 0.03);
    }
}

TEST_CASE("mean recombination") {
    const std::vector<double> weights{0.75, 0.25};
    CHECK(recombine_mean(std::vector<ScoredSolution>{{{3.0, 4.0}, 1.0}}, weights) == Vector{3.0, 4.0});
    const auto same = recombine_mean(
        std::vector<ScoredSolution>{{{1.5, -2.0}, 1.0}, {{1.5, -2.0}, 2.0}}, weights);
    CHECK(same[0] == doctest::Approx(1.5));
    CHECK(same[1] == doctest::Approx(-2.0));
    const auto mixed =
        recombine_mean(std::vector<ScoredSolution>{{{0.0, 0.0}, 1.0}, {{2.0, 0.0}, 2.0}}, weights);
    CHECK(mixed[0] == doctest::Approx(0.5));
    CHECK(mixed[1] == doctest::Approx(0.0));
    CHECK_THROWS_AS(recombine_mean(std::vector<ScoredSolution>{}, weights), ContractError);
}

TEST_CASE("evolution path") {
    CHECK(update_evolution_path(Vector{0, 0}, Vector{1, 1}, Vector{1, 1}, 1.0, 0.3, 2.0) ==
          Vector{0, 0});
    const auto reset = update_evolution_path(Vector{9, 9}, Vector{2, 0}, Vector{0, 0}, 2.0, 1.0, 4.0);
    CHECK(reset[0] == doctest::Approx(2.0));
    CHECK(reset[1] == doctest::Approx(0.0));
    const auto p = update_evolution_path(Vector{1, 0}, Vector{1, 1}, Vector{0, 0}, 2.0, 0.5, 4.0);
    CHECK(p[0] == doctest::Approx(1.3660254037844386));
    CHECK(p[1] == doctest::Approx(0.8660254037844386));
    CHECK_THROWS_AS(update_evolution_path(Vector{0}, Vector{0}, Vector{0}, 0.0, 0.5, 1.0),
                    ContractError);
}

TEST_CASE("one-fifth rule") {
    CHECK(sigma_one_fifth(1.0, true, 0.2, 1.0) == doctest::Approx(2.225540928492468));
    CHECK(sigma_one_fifth(1.0, false, 0.2, 1.0) == doctest::Approx(0.8187307530779818));
    double sigma = 1.0;
    sigma = sigma_one_fifth(sigma, true, 0.2, 1.0);
    for (int k = 0; k < 4; ++k) sigma = sigma_one_fifth(sigma, false, 0.2, 1.0);
    CHECK(sigma == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("one-fifth rule has no drift at the target success rate") {
    Rng rng(1234);
    std::bernoulli_distribution success(0.2);
    double sigma = 1.0;
    const int steps = 100'000;
    for (int k = 0; k < steps; ++k) sigma = sigma_one_fifth(sigma, success(rng), 0.2, 1.0);
    CHECK(std::abs(std::log(sigma) / steps) <= 0.02);
}

TEST_CASE("steady-state acceptance") {
    SUBCASE("empty best set accepts") {
        const auto params = small_params(2, 2);
        auto state = initial_state(params, Vector{0, 0});
        CHECK(steady_state_accept(state, params, scored(2, 100.0)));
        CHECK(state.best_set.size() == 1);
        CHECK(state.evals == 1);
        CHECK(state.best_fitness == 100.0);
    }
    SUBCASE("strict improvement over the worst is required") {
        const auto params = small_params(2, 2);
        auto state = initial_state(params, Vector{0, 0});
        steady_state_accept(state, params, scored(2, 1.0));
        steady_state_accept(state, params, scored(2, 1.0));
        const auto mean = state.mean;
        const double sigma = state.sigma;
        CHECK_FALSE(steady_state_accept(state, params, scored(2, 2.0)));
        CHECK_FALSE(steady_state_accept(state, params, scored(2, 1.0)));
        CHECK(state.best_set.size() == 2);
        CHECK(state.mean == mean);
        CHECK(state.sigma < sigma);
        CHECK(state.evals == 4);
    }
    SUBCASE("better candidate replaces the worst") {
        const auto params = small_params(2, 2);
        auto state = initial_state(params, Vector{0, 0});
        steady_state_accept(state, params, scored(2, 1.0, 1.0));
        steady_state_accept(state, params, scored(2, 3.0, 3.0));
        CHECK(steady_state_accept(state, params, scored(2, 2.0, 2.0)));
        REQUIRE(state.best_set.size() == 2);
        CHECK(state.best_set[0].fitness == 1.0);
        CHECK(state.best_set[1].fitness == 2.0);
        CHECK(state.best_fitness == 1.0);
    }
    SUBCASE("non-finite fitness is discarded as a failure") {
        const auto params = small_params(2, 2);
        auto state = initial_state(params, Vector{0, 0});
        const double sigma = state.sigma;
        CHECK_FALSE(steady_state_accept(state, params, scored(2, std::nan(""))));
        CHECK(state.best_set.empty());
        CHECK(state.evals == 1);
        CHECK(state.sigma == doctest::Approx(sigma_one_fifth(sigma, false, 0.2, params.d_sigma)));
        CHECK(std::isinf(state.best_fitness));
    }
    SUBCASE("pairs are saved at most once per spacing window") {
        auto params = small_params(3, 3);
        params.n_steps = 5;
        auto state = initial_state(params, Vector{0, 0, 0});
        Rng rng(3);
        std::normal_distribution<double> normal;
        for (int k = 0; k < 40; ++k) {
            auto c = scored(3, 100.0 - k);  // always accepted
            for (auto& x : c.x) x = normal(rng);
            steady_state_accept(state, params, c);
        }
        const auto entries = state.archive->entries();
        REQUIRE(!entries.empty());
        for (std::size_t j = 1; j < entries.size(); ++j) {
            CHECK(entries[j].stamp - entries[j - 1].stamp >= params.n_steps);
        }
    }
}

TEST_CASE("random acceptance streams keep the best set sorted, bounded and strict") {
    auto params = small_params(3, 7);
    auto state = initial_state(params, Vector{0, 0, 0});
    Rng rng(99);
    std::uniform_real_distribution<double> fitness(0.0, 1000.0);
    double record = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10'000; ++k) {
        const double f = fitness(rng) / (1.0 + k * 0.01);
        const bool full = state.best_set.size() == params.ss_pool;
        const double worst = full ? state.best_set.back().fitness : 0.0;
        const bool accepted = steady_state_accept(state, params, scored(3, f));
        REQUIRE(accepted == (!full || f < worst));
        REQUIRE(state.best_set.size() <= params.ss_pool);
        REQUIRE(std::is_sorted(state.best_set.begin(), state.best_set.end(),
                               [](const auto& a, const auto& b) { return a.fitness < b.fitness; }));
        REQUIRE(state.best_fitness <= record);
        record = std::min(record, f);
        REQUIRE(state.best_fitness == record);
        REQUIRE(state.sigma > 0.0);
    }
}

TEST_CASE("population success signal") {
    const std::vector<double> prev{5, 6, 7, 8};
    CHECK(population_success(prev, std::vector<double>{1, 2, 3, 4}) ==
          doctest::Approx((26.0 - 10.0) / 16.0 - 0.3));
    CHECK(population_success(prev, std::vector<double>{9, 10, 11, 12}) ==
          doctest::Approx((10.0 - 26.0) / 16.0 - 0.3));
    CHECK_THROWS_AS(population_success(prev, std::vector<double>{1.0}), ContractError);
}

namespace {

BatchEvaluator sphere_batch() {
    return [](std::span<Candidate> batch) {
        for (auto& c : batch) c.fitness = sphere(c.x);
    };
}

}  // namespace

TEST_CASE("generational step") {
    SUBCASE("best fitness never regresses") {
        const auto params = default_params(5);
        auto state = initial_state(params, Vector(5, 0.0));
        state.best_fitness = -1.0;  // nothing can beat this record
        Rng rng(4);
        generational_step(state, params, rng, sphere_batch());
        CHECK(state.best_fitness == -1.0);
        CHECK(state.evals == static_cast<std::int64_t>(params.lambda));
        CHECK(state.generation == 1);
        CHECK(state.archive->size() == 1);
    }
    SUBCASE("replay is deterministic") {
        const auto params = default_params(2);
        auto run = [&] {
            auto state = initial_state(params, Vector{1.0, -2.0});
            Rng rng(17);
            generational_step(state, params, rng, sphere_batch());
            generational_step(state, params, rng, sphere_batch());
            return state;
        };
        const auto a = run();
        const auto b = run();
        CHECK(a.mean == b.mean);
        CHECK(a.sigma == b.sigma);
        CHECK(a.p_c == b.p_c);
        CHECK(a.best_fitness == b.best_fitness);
        CHECK(a.evals == b.evals);
    }
    SUBCASE("progress on sphere over 20 seeds") {
        const auto params = default_params(10);
        std::vector<double> early, late;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            Rng init(seed);
            auto state = initial_state(params, uniform_initial_mean(10, -5.0, 5.0, init));
            Rng rng(seed + 100);
            while (state.evals < 200) generational_step(state, params, rng, sphere_batch());
            early.push_back(state.best_fitness);
            while (state.evals < 2000) generational_step(state, params, rng, sphere_batch());
            late.push_back(state.best_fitness);
        }
        std::sort(early.begin(), early.end());
        std::sort(late.begin(), late.end());
        const double early_median = 0.5 * (early[9] + early[10]);
        const double late_median = 0.5 * (late[9] + late[10]);
        CHECK(late_median < early_median);
    }
}
