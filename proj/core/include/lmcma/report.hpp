#pragma once

// Serialisation of batch results: runs.csv, summary.csv, tables.txt and
// per-run convergence series.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmcma/harness.hpp"

namespace lmcma {

/// One (run, threshold) line of runs.csv.
struct RunRow {
    CellKey cell;
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
    double threshold = 0.0;
    std::optional<double> time_s;
    std::optional<std::int64_t> evals_at_cross;
    std::optional<double> mean_cpu_load;
    TerminalReason terminal_reason = TerminalReason::Budget;

    friend bool operator==(const RunRow&, const RunRow&) = default;
};

std::vector<RunRow> to_rows(std::span<const RunRecord> records);

/// Shortest decimal that parses back to the same double; '.' always.
std::string format_number(double value);

/// Throws InputError carrying the path on I/O failure.
void write_runs_csv(std::span<const RunRow> rows, const std::filesystem::path& path);
std::vector<RunRow> read_runs_csv(const std::filesystem::path& path);

void write_summary_csv(std::span<const ThresholdRecord> records,
                       const std::filesystem::path& path);

/// "T/L": median seconds with 2 decimals, median load with 1; "---" when
/// the threshold was not reached by a majority of runs.
std::string format_entry(const ThresholdRecord& record);

/// Text tables: one section per (function, workers, complexity), rows by
/// dimension and mode, columns by threshold.
std::string render_table(std::span<const ThresholdRecord> records);

/// Writes <dir>/<cell>/<repetition>.dat with "evals best_fitness" rows.
void emit_plot_data(std::span<const RunRecord> records, const std::filesystem::path& dir);

/// runs.csv, summary.csv, tables.txt and plot-data/ under `dir`.
void write_outputs(std::span<const RunRecord> records, const std::filesystem::path& dir);

}  // namespace lmcma
