#pragma once

// Fan-out of independent jobs (replicates, chains). Each job owns its RNG
// stream, so results do not depend on the thread count or schedule.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ed {

/// ED_THREADS if set to a positive integer, else hardware concurrency.
inline std::size_t thread_budget() {
    if (const char* env = std::getenv("ED_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs f(0..jobs-1). The first exception thrown by any job is rethrown.
template <class F>
void parallel_for(std::size_t jobs, F&& f, std::size_t threads = thread_budget()) {
    threads = std::min(threads, jobs);
    if (threads <= 1) {
        for (std::size_t j = 0; j < jobs; ++j) f(j);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t j = next++; j < jobs; j = next++) {
                try {
                    f(j);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace ed
