#ifndef RKM_PARALLEL_HPP
#define RKM_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rkm {

namespace detail {
inline std::atomic<unsigned> max_threads{0};
inline thread_local bool inside_parallel_region = false;
} // namespace detail

/// Caps the worker count used by parallel_for. Zero means hardware concurrency.
inline void set_max_threads(unsigned count) { detail::max_threads.store(count); }

inline unsigned effective_threads() {
    unsigned cap = detail::max_threads.load();
    if (cap == 0) {
        cap = std::max(1u, std::thread::hardware_concurrency());
    }
    return cap;
}

/**
 * Runs body(i) for i in [0, count). Each index writes only its own output
 * slot, so results never depend on scheduling. Nested calls run serially on
 * the calling worker. The first exception thrown by any body is rethrown.
 */
template <typename Body>
void parallel_for(std::size_t count, Body &&body) {
    const std::size_t workers = std::min<std::size_t>(effective_threads(), count);
    if (workers <= 1 || detail::inside_parallel_region) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        detail::inside_parallel_region = true;
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) {
                break;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(count);
            }
        }
        detail::inside_parallel_region = false;
    };

    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace rkm

#endif
