#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace liquidation {

/// Worker count from LIQUIDATOR_THREADS (0 or unset = hardware concurrency).
inline unsigned worker_count(int requested = -1) {
    long n = requested;
    if (n < 0) {
        n = 0;
        if (const char* env = std::getenv("LIQUIDATOR_THREADS")) {
            try {
                n = std::stol(env);
            } catch (const std::exception&) {
                n = 0;
            }
        }
    }
    if (n <= 0) n = static_cast<long>(std::max(1u, std::thread::hardware_concurrency()));
    return static_cast<unsigned>(n);
}

/// Calls body(i) for i in [0, count). Each index is visited exactly once; the
/// first exception thrown by any worker is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
    workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), std::max<std::size_t>(count, 1)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace liquidation
