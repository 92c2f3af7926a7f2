// Command-line front end for the experiment harness.
//
//   lmcma single --function sphere --dimension 100 --workers 2 --runs 5
//   lmcma run --function sphere,rastrigin --dimension 100 --complexity 0,600
//
// `run` sweeps the full matrix unless axes are narrowed; `single` runs one
// cell. Both write runs.csv, summary.csv, tables.txt and plot-data/ to --out.

#include <chrono>
#include <charconv>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lmcma/error.hpp"
#include "lmcma/harness.hpp"
#include "lmcma/report.hpp"

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        const auto comma = text.find(',', begin);
        auto item = text.substr(begin, comma == std::string::npos ? std::string::npos : comma - begin);
        if (!item.empty()) items.push_back(item);
        if (comma == std::string::npos) break;
        begin = comma + 1;
    }
    return items;
}

template <typename T>
T parse_number(const std::string& text) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw lmcma::ContractError("not a number: '" + text + "'");
    }
    return value;
}

template <typename T>
std::vector<T> parse_numbers(const std::string& text) {
    std::vector<T> out;
    for (const auto& item : split_list(text)) out.push_back(parse_number<T>(item));
    return out;
}

struct Options {
    std::string functions;
    std::string dimensions;
    std::string complexities;
    std::string workers;
    std::string modes;
    std::size_t runs = 0;
    std::uint64_t seed = 1;
    std::string thresholds;
    std::int64_t budget = 1'000'000;
    std::string out = "results";
    int sample_period_ms = 100;
};

void add_options(CLI::App& command, Options& options, bool single) {
    const char* list_hint = single ? "" : " (comma-separated list)";
    command.add_option("--function", options.functions,
                       std::string("sphere | rastrigin | rosenbrock | ellipsoid") + list_hint);
    command.add_option("--dimension", options.dimensions, std::string("Problem dimension") + list_hint);
    command.add_option("--complexity", options.complexities,
                       std::string("Injected graph vertices: 0, 200, 400 or 600") + list_hint);
    command.add_option("--workers", options.workers, std::string("Worker threads") + list_hint);
    command.add_option("--mode", options.modes, std::string("async | generational") + list_hint);
    command.add_option("--runs", options.runs,
                       "Repetitions per cell (default: 100, or 50 with complexity > 0)");
    command.add_option("--seed", options.seed, "Master seed")->capture_default_str();
    command.add_option("--thresholds", options.thresholds,
                       "Comma-separated descending fitness thresholds (applies to every function)");
    command.add_option("--budget", options.budget, "Evaluation budget per run")->capture_default_str();
    command.add_option("--out", options.out, "Output directory")->capture_default_str();
    command.add_option("--sample-period-ms", options.sample_period_ms, "CPU-load sample period")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

lmcma::ExperimentConfig build_config(const Options& options, bool single) {
    auto config = lmcma::ExperimentConfig::full_matrix();
    if (single) {
        config.functions = {lmcma::FunctionId::Sphere};
        config.dimensions = {100};
        config.complexities = {0};
        config.worker_counts = {2};
        config.modes = {lmcma::Mode::Async};
    }
    if (!options.functions.empty()) {
        config.functions.clear();
        for (const auto& name : split_list(options.functions)) {
            config.functions.push_back(lmcma::parse_function(name));
        }
    }
    if (!options.dimensions.empty()) config.dimensions = parse_numbers<std::size_t>(options.dimensions);
    if (!options.complexities.empty()) {
        config.complexities = parse_numbers<std::size_t>(options.complexities);
    }
    if (!options.workers.empty()) config.worker_counts = parse_numbers<std::size_t>(options.workers);
    if (!options.modes.empty()) {
        config.modes.clear();
        for (const auto& name : split_list(options.modes)) {
            config.modes.push_back(lmcma::parse_mode(name));
        }
    }
    if (single) {
        const bool one_cell = config.functions.size() == 1 && config.dimensions.size() == 1 &&
                              config.complexities.size() == 1 && config.worker_counts.size() == 1 &&
                              config.modes.size() == 1;
        if (!one_cell) throw lmcma::ContractError("`single` takes exactly one value per axis");
    }
    if (options.runs > 0) config.repetitions = options.runs;
    if (!options.thresholds.empty()) {
        const auto levels = parse_numbers<double>(options.thresholds);
        for (auto function : config.functions) config.thresholds[function] = levels;
    }
    config.master_seed = options.seed;
    config.eval_budget = options.budget;
    config.sample_period = std::chrono::milliseconds(options.sample_period_ms);
    config.validate();
    return config;
}

int execute(const lmcma::ExperimentConfig& config, const std::filesystem::path& out) {
    const auto observer = [](const lmcma::RunRecord& record, std::size_t done, std::size_t total) {
        std::cerr << '[' << done << '/' << total << "] " << lmcma::cell_label(record.cell)
                  << " rep " << record.repetition << ": "
                  << lmcma::reason_name(record.result.terminal_reason) << " after "
                  << record.result.evals_used << " evals, best "
                  << lmcma::format_number(record.result.best_fitness) << ", "
                  << record.result.wall_time_s << " s";
        if (!record.result.error_message.empty()) std::cerr << " (" << record.result.error_message << ')';
        if (!record.result.cpu_counter_available) std::cerr << " [cpu counter unavailable]";
        std::cerr << '\n';
    };
    const auto records = lmcma::run_batch(config, observer);
    lmcma::write_outputs(records, out);
    std::cout << lmcma::render_table(lmcma::aggregate(records));
    std::cerr << "wrote " << out.string() << "/{runs.csv,summary.csv,tables.txt,plot-data/}\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asynchronous limited-memory CMA-ES benchmark harness"};
    app.require_subcommand(1);

    Options run_options;
    auto* run_cmd = app.add_subcommand("run", "Run the experiment matrix");
    add_options(*run_cmd, run_options, false);

    Options single_options;
    auto* single_cmd = app.add_subcommand("single", "Run one experiment cell");
    add_options(*single_cmd, single_options, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            return execute(build_config(run_options, false), run_options.out);
        }
        return execute(build_config(single_options, true), single_options.out);
    } catch (const std::exception& e) {
        std::cerr << "lmcma: " << e.what() << '\n';
        return 2;
    }
}
