#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pcpd {

inline std::size_t resolve_threads(std::size_t requested) {
    if (requested > 0) {
        return requested;
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Runs fn(worker, index) for index in [0, count), interleaving indices across
// `threads` workers. Worker w only ever sees indices congruent to w, so
// per-worker scratch state needs no synchronization.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    threads = std::min(resolve_threads(threads), std::max<std::size_t>(count, 1));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(std::size_t{0}, i);
        }
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += threads) {
                    fn(w, i);
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace pcpd
