#pragma once

// Optimisation drivers: the asynchronous steady-state loop and the
// generational baseline.
//
// In asynchronous mode every worker repeats: sample from its private
// snapshot, evaluate, then enter the single update region, integrate the
// result, check termination and take a fresh snapshot. Only the update
// region touches shared state.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmcma/objectives.hpp"
#include "lmcma/strategy.hpp"
#include "lmcma/trace.hpp"

namespace lmcma {

enum class Mode { Async, Generational };

std::string_view mode_name(Mode mode);
/// Accepts "async" and "generational" (case-insensitive).
Mode parse_mode(std::string_view name);

enum class TerminalReason { Optimum, Budget, Stagnation, Error };

std::string_view reason_name(TerminalReason reason);
TerminalReason parse_reason(std::string_view name);

/// Passed to the progress observer from inside the update region. The
/// observer runs while all other workers wait on that region, so it must
/// return quickly and must not call back into the engine.
struct Progress {
    std::int64_t evals = 0;
    double best_fitness = 0.0;
    double sigma = 0.0;
    double wall_time_s = 0.0;
};

using ProgressCallback = std::function<void(const Progress&)>;

struct RunConfig {
    ObjectiveSpec objective;
    AlgorithmParams params;
    std::size_t workers = 1;
    Mode mode = Mode::Async;
    std::uint64_t seed = 0;
    std::int64_t eval_budget = 1'000'000;
    double fitness_tol = 1e-10;
    double sigma_floor = 1e-20;
    /// Strictly descending fitness levels whose first crossing is timed.
    std::vector<double> thresholds;
    /// Overrides the uniform [init_low, init_high)^n start point.
    std::optional<Vector> initial_mean;
    double init_low = -5.0;
    double init_high = 5.0;
    ProgressCallback on_progress;

    void validate() const;
};

struct CpuSample {
    double time_s = 0.0;
    double load = 0.0;

    friend bool operator==(const CpuSample&, const CpuSample&) = default;
};

struct RunResult {
    TerminalReason terminal_reason = TerminalReason::Budget;
    std::string error_message;
    std::int64_t evals_used = 0;
    double wall_time_s = 0.0;
    double best_fitness = 0.0;
    double final_sigma = 0.0;
    /// One point per improvement of the best fitness.
    std::vector<TracePoint> trace;
    /// Parallel to RunConfig::thresholds.
    std::vector<std::optional<double>> threshold_times;
    /// Filled by the harness CPU monitor, empty otherwise.
    std::vector<CpuSample> cpu_samples;
    bool cpu_counter_available = true;
    /// Largest number of workers ever seen inside the update region.
    int max_region_occupancy = 0;
};

/// Termination test in priority order Optimum > Budget > Stagnation. The
/// sigma floor only applies in asynchronous mode.
std::optional<TerminalReason> check_termination(const StrategyState& state,
                                                const RunConfig& config);

RunResult run_async(const RunConfig& config);
RunResult run_async(const RunConfig& config, const Objective& objective);

RunResult run_generational(const RunConfig& config);
RunResult run_generational(const RunConfig& config, const Objective& objective);

/// Dispatches on config.mode.
RunResult run(const RunConfig& config);
RunResult run(const RunConfig& config, const Objective& objective);

}  // namespace lmcma
