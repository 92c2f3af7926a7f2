#pragma once

// Experiment matrix runner: threshold timing, CPU-load accounting and
// median aggregation across repetitions.

#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmcma/engine.hpp"
#include "lmcma/objectives.hpp"

namespace lmcma {

/// Default timing thresholds: log-equidistant for Sphere and Rastrigin,
/// valley-aware levels for Rosenbrock and Ellipsoid.
std::vector<double> default_thresholds(FunctionId function);

struct CellKey {
    FunctionId function = FunctionId::Sphere;
    std::size_t n = 0;
    std::size_t complexity = 0;
    std::size_t workers = 1;
    Mode mode = Mode::Async;

    friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

/// e.g. "sphere-n100-c600-w4-async"; used for plot-data directories.
std::string cell_label(const CellKey& cell);

/// Seed for one repetition of one cell.
std::uint64_t run_seed(std::uint64_t master_seed, const CellKey& cell, std::size_t repetition);

struct ExperimentConfig {
    std::vector<FunctionId> functions;
    std::vector<std::size_t> dimensions;
    std::vector<std::size_t> complexities;
    std::vector<std::size_t> worker_counts;
    std::vector<Mode> modes;
    /// Fixed repetition count; when unset, 100 runs without cost injection
    /// and 50 with it.
    std::optional<std::size_t> repetitions;
    std::uint64_t master_seed = 0;
    /// Per-function overrides of default_thresholds().
    std::map<FunctionId, std::vector<double>> thresholds;
    std::int64_t eval_budget = 1'000'000;
    std::chrono::milliseconds sample_period{100};

    void validate() const;
    std::size_t repetitions_for(std::size_t complexity) const;
    std::vector<double> thresholds_for(FunctionId function) const;
    std::vector<CellKey> cells() const;

    /// Full matrix: 4 functions x {100, 300, 1000} x {0, 200, 400, 600} x
    /// {2, 4, 6, 8} workers x both modes.
    static ExperimentConfig full_matrix();
};

struct ThresholdOutcome {
    double threshold = 0.0;
    std::optional<double> time_s;
    std::optional<std::int64_t> evals_at_cross;
    /// Mean CPU load from run start to the crossing.
    std::optional<double> mean_cpu_load;
};

struct RunRecord {
    CellKey cell;
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
    RunResult result;
    std::vector<ThresholdOutcome> outcomes;
};

/// Mean of the samples up to time t; when t precedes the first sample
/// boundary, the first sample (whose interval contains t) is used.
std::optional<double> mean_load_until(std::span<const CpuSample> samples, double time_s);

/// Builds per-threshold outcomes from a finished run's trace and CPU series.
std::vector<ThresholdOutcome> threshold_outcomes(const RunResult& result,
                                                 std::span<const double> thresholds);

/// Runs one configuration under a CPU-load monitor.
RunResult execute_run(const RunConfig& config, std::chrono::milliseconds sample_period);

/// RunConfig for one repetition of a cell, with default algorithm parameters.
RunConfig make_run_config(const ExperimentConfig& config, const CellKey& cell,
                          std::size_t repetition);

using RunObserver = std::function<void(const RunRecord&, std::size_t done, std::size_t total)>;

/// Every cell and repetition, strictly one run at a time. A failing run is
/// recorded with reason Error and the batch continues.
std::vector<RunRecord> run_batch(const ExperimentConfig& config,
                                 const RunObserver& observer = {});

/// Median; even counts average the two middle values. Empty input → nullopt.
std::optional<double> median(std::vector<double> values);

struct ThresholdRecord {
    CellKey cell;
    double threshold = 0.0;
    std::optional<double> median_time_s;
    std::optional<double> median_cpu_load;
    std::size_t success_count = 0;
    std::size_t repetitions = 0;

    bool reached() const noexcept { return median_time_s.has_value(); }
};

/// Groups by cell; a threshold counts as reached when at least
/// ceil(repetitions / 2) runs crossed it.
std::vector<ThresholdRecord> aggregate(std::span<const RunRecord> records);

}  // namespace lmcma
