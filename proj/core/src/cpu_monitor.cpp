#include "lmcma/cpu_monitor.hpp"

#include <ctime>

#include "lmcma/error.hpp"

namespace lmcma {

std::optional<double> process_cpu_seconds() {
    timespec ts{};
    if (clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts) != 0) return std::nullopt;
    return static_cast<double>(ts.tv_sec) + static_cast<double>(ts.tv_nsec) * 1e-9;
}

CpuLoadMonitor::CpuLoadMonitor(std::chrono::milliseconds period) : period_(period) {
    detail::require(period.count() > 0, "CpuLoadMonitor: sample period must be positive");
}

CpuLoadMonitor::~CpuLoadMonitor() {
    if (sampler_.joinable()) stop();
}

void CpuLoadMonitor::start() {
    detail::require(!sampler_.joinable(), "CpuLoadMonitor: already started");
    samples_.clear();
    const auto cpu = process_cpu_seconds();
    available_ = cpu.has_value();
    if (!available_) return;
    last_cpu_ = *cpu;
    origin_ = last_wall_ = std::chrono::steady_clock::now();
    running_ = true;
    sampler_ = std::thread([this] { loop(); });
}

std::vector<CpuSample> CpuLoadMonitor::stop() {
    if (!sampler_.joinable()) return std::move(samples_);
    {
        std::lock_guard lock(mutex_);
        running_ = false;
    }
    wake_.notify_all();
    sampler_.join();
    // A tail much shorter than the period is dominated by the join itself.
    const auto tail = std::chrono::steady_clock::now() - last_wall_;
    if (samples_.empty() || tail * 4 >= period_) take_sample();
    return std::move(samples_);
}

void CpuLoadMonitor::loop() {
    std::unique_lock lock(mutex_);
    auto next = last_wall_ + period_;
    while (running_) {
        if (wake_.wait_until(lock, next, [this] { return !running_; })) break;
        take_sample();
        next += period_;
    }
}

void CpuLoadMonitor::take_sample() {
    const auto wall = std::chrono::steady_clock::now();
    const auto cpu = process_cpu_seconds();
    if (!cpu) return;
    const double elapsed = std::chrono::duration<double>(wall - last_wall_).count();
    if (elapsed <= 0.0) return;
    samples_.push_back({std::chrono::duration<double>(wall - origin_).count(),
                        (*cpu - last_cpu_) / elapsed});
    last_cpu_ = *cpu;
    last_wall_ = wall;
}

}  // namespace lmcma
