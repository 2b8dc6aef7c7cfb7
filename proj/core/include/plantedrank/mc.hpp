#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string_view>
#include <thread>
#include <vector>

#include "plantedrank/rng.hpp"

namespace plantedrank {

// Worker cap: PLANTEDRANK_THREADS when set, otherwise hardware concurrency.
int worker_count();

// Runs f(replicate) for replicate in [0, reps); each callee derives its own
// stream from (master, replicate, tag). Results are stored by replicate index,
// so parallel and serial execution produce identical vectors. The first
// exception thrown by a worker is rethrown after the pool drains.
template <typename T, typename F>
std::vector<T> parallel_replicates(long long reps, F f) {
    std::vector<T> out(static_cast<std::size_t>(reps));
    const int workers = std::min<long long>(worker_count(), reps) > 0
                            ? static_cast<int>(std::min<long long>(worker_count(), reps))
                            : 1;
    if (workers <= 1) {
        for (long long i = 0; i < reps; ++i) out[static_cast<std::size_t>(i)] = f(i);
        return out;
    }
    std::atomic<long long> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const long long i = next.fetch_add(1);
                if (i >= reps || failed.load(std::memory_order_relaxed)) return;
                try {
                    out[static_cast<std::size_t>(i)] = f(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

struct RiskEstimate {
    double mean = 0.0;
    long long replicates = 0;
    double ci_half = 0.0;  // 95% binomial CI half-width (normal approximation)
};

inline RiskEstimate summarize_binary(const std::vector<double>& errors) {
    RiskEstimate r;
    r.replicates = static_cast<long long>(errors.size());
    if (r.replicates == 0) return r;
    double s = 0.0;
    for (double e : errors) s += e;
    r.mean = s / static_cast<double>(r.replicates);
    if (r.replicates == 1) {
        r.ci_half = 0.5;  // single replicate: full-width interval
    } else {
        r.ci_half =
            1.96 * std::sqrt(r.mean * (1.0 - r.mean) / static_cast<double>(r.replicates));
    }
    return r;
}

struct MeanEstimate {
    double mean = 0.0;
    long long replicates = 0;
    double ci_half = 0.0;  // 95% normal CI from the sample standard deviation
    double stderr_ = 0.0;
};

inline MeanEstimate summarize_mean(const std::vector<double>& values) {
    MeanEstimate r;
    r.replicates = static_cast<long long>(values.size());
    if (r.replicates == 0) return r;
    double s = 0.0;
    for (double v : values) s += v;
    r.mean = s / static_cast<double>(r.replicates);
    if (r.replicates > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - r.mean) * (v - r.mean);
        const double var = ss / static_cast<double>(r.replicates - 1);
        r.stderr_ = std::sqrt(var / static_cast<double>(r.replicates));
        r.ci_half = 1.96 * r.stderr_;
    }
    return r;
}

}  // namespace plantedrank
