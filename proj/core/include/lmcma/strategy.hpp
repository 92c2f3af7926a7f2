#pragma once

// Evolution-strategy state and update rules shared by the steady-state
// (m+1) scheme and the generational (mu/mu_w, lambda) baseline.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "lmcma/implicit_cholesky.hpp"
#include "lmcma/random.hpp"

namespace lmcma {

struct AlgorithmParams {
    std::size_t n = 0;
    std::size_t m_pairs = 0;
    std::size_t lambda = 0;
    std::size_t mu = 0;
    std::vector<double> weights;
    double mu_w = 0.0;
    double c1 = 0.0;
    double c_c = 0.0;
    std::int64_t n_steps = 0;
    double sigma0 = 0.0;
    double p_target = 0.2;
    double d_sigma = 1.0;
    std::size_t ss_pool = 0;

    /// Throws ContractError when an invariant does not hold.
    void validate() const;
};

/// Log-decreasing positive weights w_i ∝ ln(mu+1) - ln(i), normalised to 1.
std::vector<double> recombination_weights(std::size_t mu);

/// Variance-effective selection mass 1 / sum(w_i^2).
double effective_mass(std::span<const double> weights);

AlgorithmParams default_params(std::size_t n, double domain_width = 1.0);

struct ScoredSolution {
    Vector x;
    double fitness = 0.0;
};

struct StrategyState {
    Vector mean;
    double sigma = 1.0;
    Vector p_c;
    /// Ascending by fitness, at most ss_pool entries (steady-state only).
    std::vector<ScoredSolution> best_set;
    /// Immutable once published; updates swap in a fresh archive so
    /// snapshots can share it.
    std::shared_ptr<const PairArchive> archive;
    std::int64_t evals = 0;
    std::int64_t last_save = 0;
    std::int64_t generation = 0;
    double best_fitness = std::numeric_limits<double>::infinity();
    Vector best_x;
    /// Fitness values of the previous generation (generational only).
    std::vector<double> previous_fitness;
    /// Smoothed population-success signal (generational only).
    double success_signal = 0.0;
    std::uint64_t version = 0;
};

StrategyState initial_state(const AlgorithmParams& params, Vector mean);

/// Uniform initial mean in [low, high)^n.
Vector uniform_initial_mean(std::size_t n, double low, double high, Rng& rng);

struct Snapshot {
    Vector mean;
    double sigma = 1.0;
    std::shared_ptr<const PairArchive> archive;
    std::uint64_t version = 0;
};

Snapshot take_snapshot(const StrategyState& state);

struct Candidate {
    Vector z;
    Vector x;
    double fitness = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t snapshot_version = 0;
};

/// x = mean + sigma * A * z, z ~ N(0, I).
Candidate sample_candidate(const Snapshot& snapshot, Rng& rng);

/// Re-derives x from an existing draw.
Vector candidate_point(const Snapshot& snapshot, std::span<const double> z);

/// Weighted sum over the first min(weights.size(), best.size()) entries,
/// weights renormalised over that prefix.
Vector recombine_mean(std::span<const ScoredSolution> best, std::span<const double> weights);

Vector update_evolution_path(std::span<const double> p_c, std::span<const double> mean_new,
                             std::span<const double> mean_old, double sigma, double c_c,
                             double mu_w);

double sigma_one_fifth(double sigma, bool accepted, double p_target, double d_sigma);

/// Integrates one evaluated candidate into the (m+1) state. Returns true when
/// the candidate entered the best set. Always counts one evaluation and
/// applies the 1/5-th step-size rule.
bool steady_state_accept(StrategyState& state, const AlgorithmParams& params,
                         const Candidate& candidate);

/// Target of the population-success rule.
inline constexpr double kPopulationSuccessTarget = 0.3;
/// Smoothing rate of the population-success signal.
inline constexpr double kPopulationSuccessSmoothing = 0.3;

/// Rank-based success of `current` against `previous`: both generations
/// are ranked jointly, and the result is (sum of previous ranks - sum of
/// current ranks) / lambda^2 - target. Positive when the new generation is
/// better by more than the target margin.
double population_success(std::span<const double> previous, std::span<const double> current,
                          double target = kPopulationSuccessTarget);

/// Evaluates every candidate of a batch in place (fills `fitness`).
using BatchEvaluator = std::function<void(std::span<Candidate>)>;

/// One (mu/mu_w, lambda) generation: lambda samples from one snapshot,
/// weighted recombination of the best mu, path update, one pair save and
/// the population-success sigma rule: s <- (1 - c_s) s + c_s * success,
/// sigma <- sigma * exp(s / d_sigma).
void generational_step(StrategyState& state, const AlgorithmParams& params, Rng& rng,
                       const BatchEvaluator& evaluate);

}  // namespace lmcma
