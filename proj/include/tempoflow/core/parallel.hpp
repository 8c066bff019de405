#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace tempoflow {

/// Worker cap for parallel sections. Defaults to TEMPOFLOW_THREADS or the
/// hardware count; the CLI --threads flag overrides it.
inline unsigned& thread_count() {
    static unsigned n = [] {
        if (const char* env = std::getenv("TEMPOFLOW_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v >= 1) return static_cast<unsigned>(v);
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1u : hw;
    }();
    return n;
}

inline void set_thread_count(unsigned n) { thread_count() = std::max(1u, n); }

/// Runs fn(i) for i in [0, n). Each index is processed exactly once and writes
/// only to index-owned state, so results are independent of the worker count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace tempoflow
