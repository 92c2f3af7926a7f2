#include "lmcma/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lmcma/error.hpp"

namespace lmcma {

namespace {

bool fitness_less(double lhs, double rhs) {
    // Non-finite values sort last.
    const bool lhs_ok = std::isfinite(lhs);
    const bool rhs_ok = std::isfinite(rhs);
    if (lhs_ok != rhs_ok) return lhs_ok;
    return lhs_ok && lhs < rhs;
}

}  // namespace

void AlgorithmParams::validate() const {
    detail::require(n >= 1, "AlgorithmParams: n must be positive");
    detail::require(m_pairs >= 1, "AlgorithmParams: m_pairs must be positive");
    detail::require(lambda >= 1, "AlgorithmParams: lambda must be positive");
    detail::require(mu >= 1 && mu <= lambda, "AlgorithmParams: mu must lie in [1, lambda]");
    detail::require(weights.size() == mu, "AlgorithmParams: need exactly mu weights");
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        detail::require(weights[i] > 0.0, "AlgorithmParams: weights must be positive");
        detail::require(i == 0 || weights[i] <= weights[i - 1],
                        "AlgorithmParams: weights must be non-increasing");
        sum += weights[i];
    }
    detail::require(std::abs(sum - 1.0) <= 1e-12, "AlgorithmParams: weights must sum to 1");
    detail::require(std::abs(mu_w - effective_mass(weights)) <= 1e-12,
                    "AlgorithmParams: mu_w inconsistent with weights");
    detail::require(c1 > 0.0 && c1 < 1.0, "AlgorithmParams: c1 must lie in (0, 1)");
    detail::require(c_c > 0.0 && c_c <= 1.0, "AlgorithmParams: c_c must lie in (0, 1]");
    detail::require(n_steps >= 1, "AlgorithmParams: n_steps must be positive");
    detail::require(sigma0 > 0.0, "AlgorithmParams: sigma0 must be positive");
    detail::require(p_target > 0.0 && p_target < 1.0,
                    "AlgorithmParams: p_target must lie in (0, 1)");
    detail::require(d_sigma > 0.0, "AlgorithmParams: d_sigma must be positive");
    detail::require(ss_pool >= 1, "AlgorithmParams: ss_pool must be positive");
}

std::vector<double> recombination_weights(std::size_t mu) {
    detail::require(mu >= 1, "recombination_weights: mu must be positive");
    std::vector<double> weights(mu);
    const double top = std::log(static_cast<double>(mu) + 1.0);
    for (std::size_t i = 0; i < mu; ++i) weights[i] = top - std::log(static_cast<double>(i + 1));
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (auto& w : weights) w /= total;
    return weights;
}

double effective_mass(std::span<const double> weights) {
    double sum_sq = 0.0;
    for (double w : weights) sum_sq += w * w;
    return 1.0 / sum_sq;
}

AlgorithmParams default_params(std::size_t n, double domain_width) {
    detail::require(n >= 2, "default_params: dimension must be at least 2");
    detail::require(domain_width > 0.0, "default_params: domain width must be positive");
    const double dim = static_cast<double>(n);

    AlgorithmParams params;
    params.n = n;
    params.lambda = 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(dim)));
    params.mu = params.lambda / 2;
    params.weights = recombination_weights(params.mu);
    params.mu_w = effective_mass(params.weights);
    params.m_pairs = params.lambda;
    params.n_steps = static_cast<std::int64_t>(n);
    params.c1 = 1.0 / (10.0 * std::log(dim + 1.0));
    params.c_c = 1.0 / static_cast<double>(params.m_pairs);
    params.sigma0 = 0.3 * domain_width;
    params.p_target = 0.2;
    params.d_sigma = 1.0 + dim / 20.0;
    params.ss_pool = params.m_pairs;
    return params;
}

StrategyState initial_state(const AlgorithmParams& params, Vector mean) {
    params.validate();
    detail::require(mean.size() == params.n, "initial_state: mean has wrong dimension");
    StrategyState state;
    state.mean = std::move(mean);
    state.sigma = params.sigma0;
    state.p_c.assign(params.n, 0.0);
    state.archive = std::make_shared<const PairArchive>(params.n, params.m_pairs, params.c1);
    state.best_set.reserve(params.ss_pool + 1);
    return state;
}

Vector uniform_initial_mean(std::size_t n, double low, double high, Rng& rng) {
    detail::require(low < high, "uniform_initial_mean: empty interval");
    Vector mean(n);
    for (auto& value : mean) value = low + (high - low) * uniform01(rng);
    return mean;
}

Snapshot take_snapshot(const StrategyState& state) {
    return {state.mean, state.sigma, state.archive, state.version};
}

Vector candidate_point(const Snapshot& snapshot, std::span<const double> z) {
    Vector x = snapshot.archive->multiply(z);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = snapshot.mean[i] + snapshot.sigma * x[i];
    return x;
}

Candidate sample_candidate(const Snapshot& snapshot, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Candidate candidate;
    candidate.z.resize(snapshot.mean.size());
    for (auto& value : candidate.z) value = normal(rng);
    candidate.x = candidate_point(snapshot, candidate.z);
    candidate.snapshot_version = snapshot.version;
    return candidate;
}

Vector recombine_mean(std::span<const ScoredSolution> best, std::span<const double> weights) {
    detail::require(!best.empty(), "recombine_mean: empty best set");
    detail::require(!weights.empty(), "recombine_mean: no weights");
    const std::size_t used = std::min(best.size(), weights.size());
    const double total = std::accumulate(weights.begin(), weights.begin() + used, 0.0);
    Vector mean(best.front().x.size(), 0.0);
    for (std::size_t k = 0; k < used; ++k) {
        const double w = weights[k] / total;
        const auto& x = best[k].x;
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += w * x[i];
    }
    return mean;
}

Vector update_evolution_path(std::span<const double> p_c, std::span<const double> mean_new,
                             std::span<const double> mean_old, double sigma, double c_c,
                             double mu_w) {
    detail::require(sigma > 0.0, "update_evolution_path: sigma must be positive");
    detail::require(p_c.size() == mean_new.size() && p_c.size() == mean_old.size(),
                    "update_evolution_path: dimension mismatch");
    const double gain = std::sqrt(c_c * (2.0 - c_c) * mu_w) / sigma;
    Vector path(p_c.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        path[i] = (1.0 - c_c) * p_c[i] + gain * (mean_new[i] - mean_old[i]);
    }
    return path;
}

double sigma_one_fifth(double sigma, bool accepted, double p_target, double d_sigma) {
    detail::require(sigma > 0.0, "sigma_one_fifth: sigma must be positive");
    const double success = accepted ? 1.0 : 0.0;
    return sigma * std::exp((success - p_target) / d_sigma);
}

bool steady_state_accept(StrategyState& state, const AlgorithmParams& params,
                         const Candidate& candidate) {
    ++state.evals;
    ++state.version;

    bool accepted = false;
    if (std::isfinite(candidate.fitness)) {
        auto& best = state.best_set;
        const bool full = best.size() >= params.ss_pool;
        accepted = !full || candidate.fitness < best.back().fitness;
        if (accepted) {
            if (full) best.pop_back();
            auto slot = std::upper_bound(
                best.begin(), best.end(), candidate.fitness,
                [](double f, const ScoredSolution& s) { return f < s.fitness; });
            best.insert(slot, ScoredSolution{candidate.x, candidate.fitness});

            Vector mean_old = std::move(state.mean);
            state.mean = recombine_mean(best, params.weights);
            state.p_c = update_evolution_path(state.p_c, state.mean, mean_old, state.sigma,
                                              params.c_c, params.mu_w);
            if (state.evals - state.last_save >= params.n_steps) {
                auto archive = std::make_shared<PairArchive>(*state.archive);
                archive->insert(state.p_c, state.evals, params.n_steps);
                state.archive = std::move(archive);
                state.last_save = state.evals;
            }
        }
        if (candidate.fitness < state.best_fitness) {
            state.best_fitness = candidate.fitness;
            state.best_x = candidate.x;
        }
    }
    state.sigma = std::max(sigma_one_fifth(state.sigma, accepted, params.p_target, params.d_sigma),
                           std::numeric_limits<double>::min());
    return accepted;
}

double population_success(std::span<const double> previous, std::span<const double> current,
                          double target) {
    detail::require(!current.empty() && previous.size() == current.size(),
                    "population_success: generations must have equal, non-zero size");
    struct Tagged {
        double fitness;
        bool from_current;
    };
    std::vector<Tagged> merged;
    merged.reserve(previous.size() + current.size());
    for (double f : previous) merged.push_back({f, false});
    for (double f : current) merged.push_back({f, true});
    std::stable_sort(merged.begin(), merged.end(), [](const Tagged& lhs, const Tagged& rhs) {
        return fitness_less(lhs.fitness, rhs.fitness);
    });
    double previous_ranks = 0.0;
    double current_ranks = 0.0;
    for (std::size_t r = 0; r < merged.size(); ++r) {
        (merged[r].from_current ? current_ranks : previous_ranks) += static_cast<double>(r + 1);
    }
    const double lambda = static_cast<double>(current.size());
    return (previous_ranks - current_ranks) / (lambda * lambda) - target;
}

void generational_step(StrategyState& state, const AlgorithmParams& params, Rng& rng,
                       const BatchEvaluator& evaluate) {
    const Snapshot snapshot = take_snapshot(state);
    std::vector<Candidate> population;
    population.reserve(params.lambda);
    for (std::size_t k = 0; k < params.lambda; ++k) {
        population.push_back(sample_candidate(snapshot, rng));
    }
    evaluate(population);

    state.evals += static_cast<std::int64_t>(params.lambda);
    ++state.generation;
    ++state.version;

    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t lhs, std::size_t rhs) {
        return fitness_less(population[lhs].fitness, population[rhs].fitness);
    });

    const auto& leader = population[order.front()];
    if (std::isfinite(leader.fitness) && leader.fitness < state.best_fitness) {
        state.best_fitness = leader.fitness;
        state.best_x = leader.x;
    }

    std::vector<ScoredSolution> parents;
    parents.reserve(params.mu);
    for (std::size_t k = 0; k < params.mu; ++k) {
        const auto& c = population[order[k]];
        parents.push_back({c.x, c.fitness});
    }
    Vector mean_old = std::move(state.mean);
    state.mean = recombine_mean(parents, params.weights);
    state.p_c = update_evolution_path(state.p_c, state.mean, mean_old, state.sigma, params.c_c,
                                      params.mu_w);

    auto archive = std::make_shared<PairArchive>(*state.archive);
    archive->insert(state.p_c, state.generation, params.n_steps);
    state.archive = std::move(archive);
    state.last_save = state.generation;

    std::vector<double> fitness;
    fitness.reserve(population.size());
    for (const auto& c : population) fitness.push_back(c.fitness);
    if (state.previous_fitness.size() == fitness.size()) {
        state.success_signal = (1.0 - kPopulationSuccessSmoothing) * state.success_signal +
                               kPopulationSuccessSmoothing *
                                   population_success(state.previous_fitness, fitness);
        state.sigma *= std::exp(state.success_signal / params.d_sigma);
        // No stagnation stop in this mode: keep sigma positive until the budget ends.
        state.sigma = std::max(state.sigma, std::numeric_limits<double>::min());
    }
    state.previous_fitness = std::move(fitness);
}

}  // namespace lmcma
