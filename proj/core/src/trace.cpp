#include "lmcma/trace.hpp"

#include <algorithm>

#include "lmcma/error.hpp"

namespace lmcma {

std::vector<std::optional<std::size_t>> first_crossings(std::span<const TracePoint> trace,
                                                        std::span<const double> thresholds) {
    for (std::size_t i = 1; i < trace.size(); ++i) {
        detail::require(trace[i].time_s >= trace[i - 1].time_s,
                        "time_to_thresholds: trace is not time-sorted");
        detail::require(trace[i].best_fitness <= trace[i - 1].best_fitness,
                        "time_to_thresholds: trace fitness increases");
    }
    std::vector<std::optional<std::size_t>> crossings;
    crossings.reserve(thresholds.size());
    for (double threshold : thresholds) {
        // Fitness is non-increasing, so the crossing is a partition point.
        auto it = std::partition_point(trace.begin(), trace.end(), [&](const TracePoint& p) {
            return !(p.best_fitness <= threshold);
        });
        if (it == trace.end()) {
            crossings.emplace_back();
        } else {
            crossings.emplace_back(static_cast<std::size_t>(it - trace.begin()));
        }
    }
    return crossings;
}

std::vector<std::optional<double>> time_to_thresholds(std::span<const TracePoint> trace,
                                                      std::span<const double> thresholds) {
    std::vector<std::optional<double>> times;
    for (const auto& index : first_crossings(trace, thresholds)) {
        if (index) {
            times.emplace_back(trace[*index].time_s);
        } else {
            times.emplace_back();
        }
    }
    return times;
}

bool strictly_descending(std::span<const double> values) {
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] < values[i - 1])) return false;
    }
    return true;
}

}  // namespace lmcma
