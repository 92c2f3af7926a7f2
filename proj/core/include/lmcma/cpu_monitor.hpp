#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "lmcma/engine.hpp"

namespace lmcma {

/// CPU time consumed by this process (all threads), in seconds; empty when
/// the platform counter is unavailable.
std::optional<double> process_cpu_seconds();

/// Background sampler of process CPU utilisation. Each sample is the CPU
/// time consumed since the previous sample divided by the wall time
/// elapsed, so a value of k means k cores busy on average. A final partial
/// sample is taken by stop().
class CpuLoadMonitor {
public:
    explicit CpuLoadMonitor(std::chrono::milliseconds period = std::chrono::milliseconds(100));
    ~CpuLoadMonitor();

    CpuLoadMonitor(const CpuLoadMonitor&) = delete;
    CpuLoadMonitor& operator=(const CpuLoadMonitor&) = delete;

    void start();
    /// Stops sampling and returns the series; times are seconds since start().
    std::vector<CpuSample> stop();

    bool available() const noexcept { return available_; }

private:
    void loop();
    void take_sample();

    std::chrono::milliseconds period_;
    bool available_ = true;
    bool running_ = false;
    std::mutex mutex_;
    std::condition_variable wake_;
    std::chrono::steady_clock::time_point origin_;
    std::chrono::steady_clock::time_point last_wall_;
    double last_cpu_ = 0.0;
    std::vector<CpuSample> samples_;
    std::thread sampler_;
};

}  // namespace lmcma
