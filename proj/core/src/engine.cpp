#include "lmcma/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>

#include "lmcma/error.hpp"

namespace lmcma {

namespace {

using Clock = std::chrono::steady_clock;

// Stream tags for derive_seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kWorkerStream = 2;
constexpr std::uint64_t kGenerationStream = 3;

std::string lowercase(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

StrategyState make_initial_state(const RunConfig& config) {
    Vector mean;
    if (config.initial_mean) {
        mean = *config.initial_mean;
    } else {
        Rng rng(derive_seed(config.seed, {kInitStream}));
        mean = uniform_initial_mean(config.params.n, config.init_low, config.init_high, rng);
    }
    return initial_state(config.params, std::move(mean));
}

RunResult finish(const RunConfig& config, const StrategyState& state,
                 std::vector<TracePoint> trace, TerminalReason reason, Clock::time_point start) {
    RunResult result;
    result.terminal_reason = reason;
    result.evals_used = state.evals;
    result.wall_time_s = seconds_since(start);
    result.best_fitness = state.best_fitness;
    result.final_sigma = state.sigma;
    result.trace = std::move(trace);
    result.threshold_times = time_to_thresholds(result.trace, config.thresholds);
    return result;
}

// The single mutual-exclusion region guarding StrategyState. The occupancy
// counter is instrumentation: it must never exceed one.
class UpdateRegion {
public:
    class Guard {
    public:
        explicit Guard(UpdateRegion& region) : region_(region), lock_(region.mutex_) {
            const int inside = region_.occupancy_.fetch_add(1) + 1;
            int seen = region_.max_occupancy_.load();
            while (inside > seen && !region_.max_occupancy_.compare_exchange_weak(seen, inside)) {
            }
        }
        ~Guard() { region_.occupancy_.fetch_sub(1); }
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;

    private:
        UpdateRegion& region_;
        std::lock_guard<std::mutex> lock_;
    };

    int max_occupancy() const { return max_occupancy_.load(); }

private:
    std::mutex mutex_;
    std::atomic<int> occupancy_{0};
    std::atomic<int> max_occupancy_{0};
};

class AsyncRun {
public:
    AsyncRun(const RunConfig& config, const Objective& objective)
        : config_(config), objective_(objective), state_(make_initial_state(config)) {}

    RunResult execute() {
        start_ = Clock::now();
        if (state_.evals >= config_.eval_budget) {
            return finish(config_, state_, {}, TerminalReason::Budget, start_);
        }
        {
            std::vector<std::jthread> threads;
            threads.reserve(config_.workers);
            for (std::size_t w = 0; w < config_.workers; ++w) {
                threads.emplace_back([this, w] { worker(w); });
            }
        }
        auto result = finish(config_, state_, std::move(trace_),
                             reason_.value_or(TerminalReason::Budget), start_);
        result.error_message = std::move(error_);
        result.max_region_occupancy = region_.max_occupancy();
        return result;
    }

private:
    void worker(std::size_t index) {
        Rng rng(derive_seed(config_.seed, {kWorkerStream, index}));
        Snapshot snapshot;
        {
            UpdateRegion::Guard guard(region_);
            if (stop_.load()) return;
            snapshot = take_snapshot(state_);
        }
        while (!stop_.load(std::memory_order_acquire)) {
            Candidate candidate = sample_candidate(snapshot, rng);
            try {
                candidate.fitness = objective_(candidate.x);
            } catch (const std::exception& e) {
                UpdateRegion::Guard guard(region_);
                abort_run(e.what());
                return;
            }

            UpdateRegion::Guard guard(region_);
            if (stop_.load()) return;  // in-flight result after termination
            try {
                integrate(candidate);
            } catch (const std::exception& e) {
                abort_run(e.what());
                return;
            }
            if (auto reason = check_termination(state_, config_)) {
                reason_ = reason;
                stop_.store(true, std::memory_order_release);
                return;
            }
            snapshot = take_snapshot(state_);
        }
    }

    // Caller holds the update region.
    void integrate(const Candidate& candidate) {
        const double before = state_.best_fitness;
        steady_state_accept(state_, config_.params, candidate);
        const double now = seconds_since(start_);
        if (state_.best_fitness < before) {
            trace_.push_back({now, state_.evals, state_.best_fitness});
        }
        if (config_.on_progress) {
            config_.on_progress({state_.evals, state_.best_fitness, state_.sigma, now});
        }
    }

    // Caller holds the update region.
    void abort_run(const char* what) {
        if (stop_.load()) return;
        reason_ = TerminalReason::Error;
        error_ = what;
        stop_.store(true, std::memory_order_release);
    }

    const RunConfig& config_;
    const Objective& objective_;
    StrategyState state_;
    Clock::time_point start_;
    UpdateRegion region_;
    std::atomic<bool> stop_{false};
    std::optional<TerminalReason> reason_;
    std::string error_;
    std::vector<TracePoint> trace_;
};

// Persistent helpers that evaluate one generation at a time; the calling
// thread takes part and the call returns only when the batch is done.
class EvaluationPool {
public:
    EvaluationPool(std::size_t workers, const Objective& objective) : objective_(objective) {
        for (std::size_t w = 1; w < workers; ++w) {
            helpers_.emplace_back([this] { helper_loop(); });
        }
    }

    ~EvaluationPool() {
        {
            std::lock_guard lock(mutex_);
            shutdown_ = true;
        }
        start_.notify_all();
    }

    EvaluationPool(const EvaluationPool&) = delete;
    EvaluationPool& operator=(const EvaluationPool&) = delete;

    void evaluate(std::span<Candidate> batch) {
        if (helpers_.empty()) {
            for (auto& candidate : batch) candidate.fitness = objective_(candidate.x);
            return;
        }
        {
            std::lock_guard lock(mutex_);
            batch_ = batch;
            next_.store(0);
            active_ = helpers_.size();
            error_ = nullptr;
            ++epoch_;
        }
        start_.notify_all();
        drain();
        std::unique_lock lock(mutex_);
        done_.wait(lock, [this] { return active_ == 0; });
        if (error_) std::rethrow_exception(error_);
    }

private:
    void helper_loop() {
        std::uint64_t seen = 0;
        for (;;) {
            {
                std::unique_lock lock(mutex_);
                start_.wait(lock, [&] { return shutdown_ || epoch_ != seen; });
                if (shutdown_) return;
                seen = epoch_;
            }
            drain();
            {
                std::lock_guard lock(mutex_);
                --active_;
            }
            done_.notify_one();
        }
    }

    void drain() {
        for (;;) {
            const std::size_t i = next_.fetch_add(1);
            if (i >= batch_.size()) return;
            try {
                batch_[i].fitness = objective_(batch_[i].x);
            } catch (...) {
                std::lock_guard lock(mutex_);
                if (!error_) error_ = std::current_exception();
            }
        }
    }

    const Objective& objective_;
    std::mutex mutex_;
    std::condition_variable start_;
    std::condition_variable done_;
    std::span<Candidate> batch_;
    std::atomic<std::size_t> next_{0};
    std::size_t active_ = 0;
    std::uint64_t epoch_ = 0;
    bool shutdown_ = false;
    std::exception_ptr error_;
    std::vector<std::jthread> helpers_;
};

}  // namespace

std::string_view mode_name(Mode mode) {
    return mode == Mode::Async ? "async" : "generational";
}

Mode parse_mode(std::string_view name) {
    const auto lower = lowercase(name);
    if (lower == "async") return Mode::Async;
    if (lower == "generational") return Mode::Generational;
    throw ContractError("unknown mode '" + std::string(name) + "'");
}

std::string_view reason_name(TerminalReason reason) {
    switch (reason) {
        case TerminalReason::Optimum: return "optimum";
        case TerminalReason::Budget: return "budget";
        case TerminalReason::Stagnation: return "stagnation";
        case TerminalReason::Error: return "error";
    }
    return "unknown";
}

TerminalReason parse_reason(std::string_view name) {
    const auto lower = lowercase(name);
    if (lower == "optimum") return TerminalReason::Optimum;
    if (lower == "budget") return TerminalReason::Budget;
    if (lower == "stagnation") return TerminalReason::Stagnation;
    if (lower == "error") return TerminalReason::Error;
    throw ContractError("unknown terminal reason '" + std::string(name) + "'");
}

void RunConfig::validate() const {
    objective.validate();
    params.validate();
    detail::require(params.n == objective.n, "RunConfig: params and objective dimensions differ");
    detail::require(workers >= 1, "RunConfig: need at least one worker");
    detail::require(eval_budget >= 0, "RunConfig: eval_budget must be non-negative");
    detail::require(strictly_descending(thresholds),
                    "RunConfig: thresholds must be strictly descending");
    detail::require(!initial_mean || initial_mean->size() == params.n,
                    "RunConfig: initial mean has wrong dimension");
}

std::optional<TerminalReason> check_termination(const StrategyState& state,
                                                const RunConfig& config) {
    if (state.best_fitness <= config.fitness_tol) return TerminalReason::Optimum;
    if (state.evals >= config.eval_budget) return TerminalReason::Budget;
    if (config.mode == Mode::Async && state.sigma < config.sigma_floor) {
        return TerminalReason::Stagnation;
    }
    return std::nullopt;
}

RunResult run_async(const RunConfig& config) {
    return run_async(config, make_objective(config.objective));
}

RunResult run_async(const RunConfig& config, const Objective& objective) {
    config.validate();
    detail::require(config.mode == Mode::Async, "run_async: config mode is not async");
    AsyncRun run(config, objective);
    return run.execute();
}

RunResult run_generational(const RunConfig& config) {
    return run_generational(config, make_objective(config.objective));
}

RunResult run_generational(const RunConfig& config, const Objective& objective) {
    config.validate();
    detail::require(config.mode == Mode::Generational,
                    "run_generational: config mode is not generational");

    StrategyState state = make_initial_state(config);
    const auto start = Clock::now();
    std::vector<TracePoint> trace;
    if (state.evals >= config.eval_budget) {
        return finish(config, state, {}, TerminalReason::Budget, start);
    }

    Rng rng(derive_seed(config.seed, {kGenerationStream}));
    EvaluationPool pool(config.workers, objective);
    const BatchEvaluator evaluate = [&pool](std::span<Candidate> batch) { pool.evaluate(batch); };

    for (;;) {
        const double before = state.best_fitness;
        try {
            generational_step(state, config.params, rng, evaluate);
        } catch (const std::exception& e) {
            auto result = finish(config, state, std::move(trace), TerminalReason::Error, start);
            result.error_message = e.what();
            result.max_region_occupancy = 1;
            return result;
        }
        const double now = seconds_since(start);
        if (state.best_fitness < before) trace.push_back({now, state.evals, state.best_fitness});
        if (config.on_progress) {
            config.on_progress({state.evals, state.best_fitness, state.sigma, now});
        }
        if (auto reason = check_termination(state, config)) {
            auto result = finish(config, state, std::move(trace), *reason, start);
            result.max_region_occupancy = 1;
            return result;
        }
    }
}

RunResult run(const RunConfig& config) {
    return run(config, make_objective(config.objective));
}

RunResult run(const RunConfig& config, const Objective& objective) {
    return config.mode == Mode::Async ? run_async(config, objective)
                                      : run_generational(config, objective);
}

}  // namespace lmcma
