#include "lmcma/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lmcma/cpu_monitor.hpp"
#include "lmcma/error.hpp"
#include "lmcma/random.hpp"
#include "lmcma/trace.hpp"

namespace lmcma {

namespace {

constexpr std::uint64_t kGraphStream = 0x67726170;  // "grap"

}  // namespace

std::vector<double> default_thresholds(FunctionId function) {
    switch (function) {
        case FunctionId::Sphere:
        case FunctionId::Rastrigin:
            return {1.0, 3e-2, 1e-5, 3e-7, 1e-10};
        case FunctionId::Rosenbrock:
        case FunctionId::Ellipsoid:
            return {3000.0, 100.0, 1e-2, 3e-6, 1e-10};
    }
    return {};
}

std::string cell_label(const CellKey& cell) {
    return std::string(function_name(cell.function)) + "-n" + std::to_string(cell.n) + "-c" +
           std::to_string(cell.complexity) + "-w" + std::to_string(cell.workers) + "-" +
           std::string(mode_name(cell.mode));
}

std::uint64_t run_seed(std::uint64_t master_seed, const CellKey& cell, std::size_t repetition) {
    return derive_seed(master_seed, {static_cast<std::uint64_t>(cell.function), cell.n,
                                     cell.complexity, cell.workers,
                                     static_cast<std::uint64_t>(cell.mode), repetition});
}

void ExperimentConfig::validate() const {
    detail::require(!functions.empty() && !dimensions.empty() && !complexities.empty() &&
                        !worker_counts.empty() && !modes.empty(),
                    "ExperimentConfig: every matrix axis needs at least one value");
    detail::require(!repetitions || *repetitions >= 1,
                    "ExperimentConfig: repetitions must be at least 1");
    for (auto n : dimensions) detail::require(n >= 2, "ExperimentConfig: dimension must be >= 2");
    for (auto c : complexities) {
        detail::require(is_valid_complexity(c),
                        "ExperimentConfig: complexity must be one of 0, 200, 400, 600");
    }
    for (auto w : worker_counts) detail::require(w >= 1, "ExperimentConfig: workers must be >= 1");
    for (const auto& [function, levels] : thresholds) {
        detail::require(strictly_descending(levels),
                        "ExperimentConfig: thresholds must be strictly descending");
    }
    detail::require(eval_budget >= 0, "ExperimentConfig: budget must be non-negative");
    detail::require(sample_period.count() > 0, "ExperimentConfig: sample period must be positive");
}

std::size_t ExperimentConfig::repetitions_for(std::size_t complexity) const {
    if (repetitions) return *repetitions;
    return complexity == 0 ? 100 : 50;
}

std::vector<double> ExperimentConfig::thresholds_for(FunctionId function) const {
    if (auto it = thresholds.find(function); it != thresholds.end()) return it->second;
    return default_thresholds(function);
}

std::vector<CellKey> ExperimentConfig::cells() const {
    std::vector<CellKey> out;
    for (auto function : functions)
        for (auto n : dimensions)
            for (auto complexity : complexities)
                for (auto workers : worker_counts)
                    for (auto mode : modes) out.push_back({function, n, complexity, workers, mode});
    return out;
}

ExperimentConfig ExperimentConfig::full_matrix() {
    ExperimentConfig config;
    config.functions = {FunctionId::Sphere, FunctionId::Rastrigin, FunctionId::Rosenbrock,
                        FunctionId::Ellipsoid};
    config.dimensions = {100, 300, 1000};
    config.complexities = {0, 200, 400, 600};
    config.worker_counts = {2, 4, 6, 8};
    config.modes = {Mode::Async, Mode::Generational};
    return config;
}

std::optional<double> mean_load_until(std::span<const CpuSample> samples, double time_s) {
    if (samples.empty()) return std::nullopt;
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& sample : samples) {
        if (sample.time_s > time_s) break;
        sum += sample.load;
        ++count;
    }
    if (count == 0) return samples.front().load;
    return sum / static_cast<double>(count);
}

std::vector<ThresholdOutcome> threshold_outcomes(const RunResult& result,
                                                 std::span<const double> thresholds) {
    const auto crossings = first_crossings(result.trace, thresholds);
    std::vector<ThresholdOutcome> outcomes;
    outcomes.reserve(thresholds.size());
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        ThresholdOutcome outcome;
        outcome.threshold = thresholds[k];
        if (crossings[k]) {
            const auto& point = result.trace[*crossings[k]];
            outcome.time_s = point.time_s;
            outcome.evals_at_cross = point.evals;
            outcome.mean_cpu_load = mean_load_until(result.cpu_samples, point.time_s);
        }
        outcomes.push_back(outcome);
    }
    return outcomes;
}

RunResult execute_run(const RunConfig& config, std::chrono::milliseconds sample_period) {
    // The objective (and any graph) is built before sampling starts.
    const Objective objective = make_objective(config.objective);
    CpuLoadMonitor monitor(sample_period);
    monitor.start();
    RunResult result = run(config, objective);
    result.cpu_samples = monitor.stop();
    result.cpu_counter_available = monitor.available();
    return result;
}

RunConfig make_run_config(const ExperimentConfig& config, const CellKey& cell,
                          std::size_t repetition) {
    RunConfig run_config;
    run_config.seed = run_seed(config.master_seed, cell, repetition);
    run_config.objective = ObjectiveSpec{cell.function, cell.n, cell.complexity,
                                         derive_seed(run_config.seed, {kGraphStream})};
    run_config.params = default_params(cell.n);
    run_config.workers = cell.workers;
    run_config.mode = cell.mode;
    run_config.eval_budget = config.eval_budget;
    run_config.thresholds = config.thresholds_for(cell.function);
    return run_config;
}

std::vector<RunRecord> run_batch(const ExperimentConfig& config, const RunObserver& observer) {
    config.validate();
    const auto cells = config.cells();
    std::size_t total = 0;
    for (const auto& cell : cells) total += config.repetitions_for(cell.complexity);

    std::vector<RunRecord> records;
    records.reserve(total);
    for (const auto& cell : cells) {
        const std::size_t reps = config.repetitions_for(cell.complexity);
        for (std::size_t rep = 0; rep < reps; ++rep) {
            RunRecord record;
            record.cell = cell;
            record.repetition = rep;
            const RunConfig run_config = make_run_config(config, cell, rep);
            record.seed = run_config.seed;
            try {
                record.result = execute_run(run_config, config.sample_period);
            } catch (const std::exception& e) {
                record.result = RunResult{};
                record.result.terminal_reason = TerminalReason::Error;
                record.result.error_message = e.what();
                record.result.best_fitness = std::numeric_limits<double>::infinity();
            }
            record.outcomes = threshold_outcomes(record.result, run_config.thresholds);
            records.push_back(std::move(record));
            if (observer) observer(records.back(), records.size(), total);
        }
    }
    return records;
}

std::optional<double> median(std::vector<double> values) {
    if (values.empty()) return std::nullopt;
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<ThresholdRecord> aggregate(std::span<const RunRecord> records) {
    std::map<CellKey, std::vector<const RunRecord*>> groups;
    for (const auto& record : records) groups[record.cell].push_back(&record);

    std::vector<ThresholdRecord> out;
    for (const auto& [cell, runs] : groups) {
        // Threshold list of the cell: union over runs, kept descending.
        std::vector<double> levels;
        for (const auto* run : runs) {
            for (const auto& outcome : run->outcomes) levels.push_back(outcome.threshold);
        }
        std::sort(levels.begin(), levels.end(), std::greater<>());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

        const std::size_t repetitions = runs.size();
        const std::size_t majority = (repetitions + 1) / 2;
        for (double level : levels) {
            std::vector<double> times;
            std::vector<double> loads;
            for (const auto* run : runs) {
                for (const auto& outcome : run->outcomes) {
                    if (outcome.threshold != level || !outcome.time_s) continue;
                    times.push_back(*outcome.time_s);
                    if (outcome.mean_cpu_load) loads.push_back(*outcome.mean_cpu_load);
                }
            }
            ThresholdRecord entry;
            entry.cell = cell;
            entry.threshold = level;
            entry.success_count = times.size();
            entry.repetitions = repetitions;
            if (entry.success_count >= majority) {
                entry.median_time_s = median(std::move(times));
                entry.median_cpu_load = median(std::move(loads));
            }
            out.push_back(entry);
        }
    }
    return out;
}

}  // namespace lmcma
