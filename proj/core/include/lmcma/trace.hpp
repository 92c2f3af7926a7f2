#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace lmcma {

/// Best-so-far fitness at a wall-clock instant since run start.
struct TracePoint {
    double time_s = 0.0;
    std::int64_t evals = 0;
    double best_fitness = 0.0;

    friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

/// Index of the first trace point with best_fitness <= threshold, for each
/// threshold. The trace must be time-sorted with non-increasing fitness
/// (ContractError otherwise).
std::vector<std::optional<std::size_t>> first_crossings(std::span<const TracePoint> trace,
                                                        std::span<const double> thresholds);

/// Earliest time at which the trace is at or below each threshold.
std::vector<std::optional<double>> time_to_thresholds(std::span<const TracePoint> trace,
                                                      std::span<const double> thresholds);

/// True when the list is strictly descending.
bool strictly_descending(std::span<const double> values);

}  // namespace lmcma
