#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace hycop {

/// Process-wide worker count used by parallel_for (0 = hardware concurrency).
void set_thread_count(int n);
int thread_count();

/// Runs fn(i) for i in [0,n) across the worker pool.  Work is handed out via
/// an atomic counter, but callers must write results into per-index slots so
/// that any later reduction happens in a fixed order; this is what keeps
/// training byte-reproducible regardless of the worker count.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    int workers = thread_count();
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    workers = std::min(workers, n);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace hycop
