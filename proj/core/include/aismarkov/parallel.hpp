#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace aismarkov {

/// Runs task(i) for i in [0, count) on up to `workers` threads. Tasks are
/// handed out dynamically; callers that need determinism must write results
/// into slot i and reduce afterwards. The first exception is rethrown.
template <typename Task>
void parallel_for(std::size_t count, unsigned workers, Task&& task) {
    const std::size_t nthreads = std::min<std::size_t>(std::max(1u, workers), count);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(nthreads);
        for (std::size_t t = 0; t < nthreads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        task(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) {
                            error = std::current_exception();
                        }
                        next = count;
                    }
                }
            });
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace aismarkov
