#include "lmcma/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string_view>
#include <system_error>

#include "lmcma/error.hpp"

namespace lmcma {

namespace {

constexpr std::string_view kRunsHeader =
    "function,n,complexity,workers,mode,repetition,seed,threshold,time_s,evals_at_cross,"
    "mean_cpu_load,terminal_reason";

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw InputError("cannot create directory " + path.parent_path().string() + ": " +
                                 ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open " + path.string() + " for writing");
    return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw InputError("write failed for " + path.string());
}

template <typename T>
std::string format_optional(const std::optional<T>& value) {
    if (!value) return {};
    if constexpr (std::is_floating_point_v<T>) {
        return format_number(*value);
    } else {
        return std::to_string(*value);
    }
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t begin = 0;
    for (;;) {
        const auto comma = line.find(',', begin);
        fields.push_back(line.substr(begin, comma - begin));
        if (comma == std::string_view::npos) break;
        begin = comma + 1;
    }
    return fields;
}

template <typename T>
T parse_field(std::string_view field, const std::filesystem::path& path, std::size_t line_no) {
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw InputError(path.string() + ":" + std::to_string(line_no) + ": bad number '" +
                         std::string(field) + "'");
    }
    return value;
}

template <typename T>
std::optional<T> parse_optional(std::string_view field, const std::filesystem::path& path,
                                std::size_t line_no) {
    if (field.empty()) return std::nullopt;
    return parse_field<T>(field, path, line_no);
}

std::string fixed(double value, int decimals) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
    return buffer;
}

std::string pad(std::string text, std::size_t width) {
    if (text.size() < width) text.append(width - text.size(), ' ');
    return text;
}

}  // namespace

std::vector<RunRow> to_rows(std::span<const RunRecord> records) {
    std::vector<RunRow> rows;
    for (const auto& record : records) {
        for (const auto& outcome : record.outcomes) {
            rows.push_back({record.cell, record.repetition, record.seed, outcome.threshold,
                            outcome.time_s, outcome.evals_at_cross, outcome.mean_cpu_load,
                            record.result.terminal_reason});
        }
    }
    return rows;
}

std::string format_number(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc{}) throw ContractError("format_number: conversion failed");
    return std::string(buffer, ptr);
}

void write_runs_csv(std::span<const RunRow> rows, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << kRunsHeader << '\n';
    for (const auto& row : rows) {
        out << function_name(row.cell.function) << ',' << row.cell.n << ',' << row.cell.complexity
            << ',' << row.cell.workers << ',' << mode_name(row.cell.mode) << ',' << row.repetition
            << ',' << row.seed << ',' << format_number(row.threshold) << ','
            << format_optional(row.time_s) << ',' << format_optional(row.evals_at_cross) << ','
            << format_optional(row.mean_cpu_load) << ',' << reason_name(row.terminal_reason)
            << '\n';
    }
    check_written(out, path);
}

std::vector<RunRow> read_runs_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string() + " for reading");
    std::string line;
    if (!std::getline(in, line) || line != kRunsHeader) {
        throw InputError(path.string() + ": missing or unexpected header");
    }
    std::vector<RunRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 12) {
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 12 fields");
        }
        RunRow row;
        try {
            row.cell.function = parse_function(f[0]);
            row.cell.mode = parse_mode(f[4]);
            row.terminal_reason = parse_reason(f[11]);
        } catch (const ContractError& e) {
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        row.cell.n = parse_field<std::size_t>(f[1], path, line_no);
        row.cell.complexity = parse_field<std::size_t>(f[2], path, line_no);
        row.cell.workers = parse_field<std::size_t>(f[3], path, line_no);
        row.repetition = parse_field<std::size_t>(f[5], path, line_no);
        row.seed = parse_field<std::uint64_t>(f[6], path, line_no);
        row.threshold = parse_field<double>(f[7], path, line_no);
        row.time_s = parse_optional<double>(f[8], path, line_no);
        row.evals_at_cross = parse_optional<std::int64_t>(f[9], path, line_no);
        row.mean_cpu_load = parse_optional<double>(f[10], path, line_no);
        rows.push_back(row);
    }
    return rows;
}

void write_summary_csv(std::span<const ThresholdRecord> records,
                       const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << "function,n,complexity,workers,mode,threshold,success_count,repetitions,"
           "median_time_s,median_cpu_load\n";
    for (const auto& r : records) {
        out << function_name(r.cell.function) << ',' << r.cell.n << ',' << r.cell.complexity << ','
            << r.cell.workers << ',' << mode_name(r.cell.mode) << ',' << format_number(r.threshold)
            << ',' << r.success_count << ',' << r.repetitions << ','
            << format_optional(r.median_time_s) << ',' << format_optional(r.median_cpu_load)
            << '\n';
    }
    check_written(out, path);
}

std::string format_entry(const ThresholdRecord& record) {
    if (!record.reached()) return "---";
    const std::string load =
        record.median_cpu_load ? fixed(*record.median_cpu_load, 1) : std::string("?");
    return fixed(*record.median_time_s, 2) + "/" + load;
}

std::string render_table(std::span<const ThresholdRecord> records) {
    struct Section {
        FunctionId function;
        std::size_t workers;
        std::size_t complexity;
        auto operator<=>(const Section&) const = default;
    };
    struct Row {
        std::size_t n;
        Mode mode;
        auto operator<=>(const Row&) const = default;
    };
    std::map<Section, std::map<Row, std::map<double, const ThresholdRecord*, std::greater<>>>>
        layout;
    std::map<Section, std::set<double, std::greater<>>> columns;
    for (const auto& r : records) {
        const Section section{r.cell.function, r.cell.workers, r.cell.complexity};
        layout[section][{r.cell.n, r.cell.mode}][r.threshold] = &r;
        columns[section].insert(r.threshold);
    }

    constexpr std::size_t kLabelWidth = 8;
    constexpr std::size_t kModeWidth = 14;
    constexpr std::size_t kEntryWidth = 14;
    std::ostringstream text;
    for (const auto& [section, rows] : layout) {
        text << "== " << function_name(section.function) << " | workers " << section.workers
             << " | complexity " << section.complexity << " ==\n";
        text << pad("n", kLabelWidth) << pad("algorithm", kModeWidth);
        for (double level : columns[section]) text << pad(format_number(level), kEntryWidth);
        text << '\n';
        for (const auto& [row, entries] : rows) {
            text << pad(std::to_string(row.n), kLabelWidth)
                 << pad(std::string(mode_name(row.mode)), kModeWidth);
            for (double level : columns[section]) {
                auto it = entries.find(level);
                text << pad(it == entries.end() ? std::string("---") : format_entry(*it->second),
                            kEntryWidth);
            }
            text << '\n';
        }
        text << '\n';
    }
    return text.str();
}

void emit_plot_data(std::span<const RunRecord> records, const std::filesystem::path& dir) {
    for (const auto& record : records) {
        const auto path =
            dir / cell_label(record.cell) / (std::to_string(record.repetition) + ".dat");
        auto out = open_for_write(path);
        out << "# evals best_fitness\n";
        for (const auto& point : record.result.trace) {
            out << point.evals << ' ' << format_number(point.best_fitness) << '\n';
        }
        check_written(out, path);
    }
}

void write_outputs(std::span<const RunRecord> records, const std::filesystem::path& dir) {
    const auto rows = to_rows(records);
    write_runs_csv(rows, dir / "runs.csv");
    const auto summary = aggregate(records);
    write_summary_csv(summary, dir / "summary.csv");
    auto out = open_for_write(dir / "tables.txt");
    out << render_table(summary);
    check_written(out, dir / "tables.txt");
    emit_plot_data(records, dir / "plot-data");
}

}  // namespace lmcma
