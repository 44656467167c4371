#pragma once

// Minimal job pool: split [0, n) over worker threads pulling indices from a
// shared counter; results land in caller-owned slots, so assembly stays
// order-stable regardless of scheduling.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace drcalc {

inline int resolve_jobs(int configured) {
    if (configured > 0) return configured;
    if (const char* env = std::getenv("DRCALC_JOBS"); env && *env) {
        int j = std::atoi(env);
        if (j > 0) return j;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? (int)hw : 1;
}

inline void parallel_for(long n, int jobs, const std::function<void(long)>& body) {
    jobs = resolve_jobs(jobs);
    if (jobs <= 1 || n <= 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr first_error;
    std::mutex error_lock;
    auto worker = [&] {
        for (;;) {
            long i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::scoped_lock g(error_lock);
                if (!first_error) first_error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<long>(jobs, n); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace drcalc
