#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace fishsim {

/// Runs fn(i) for i in [0, n). With workers > 1, indices are striped across
/// threads; fn must not touch shared mutable state.
inline void parallel_for(std::size_t n, int workers,
                         const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t n_threads = std::min<std::size_t>(workers, n);
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        threads.emplace_back([t, n, n_threads, &fn] {
            for (std::size_t i = t; i < n; i += n_threads) fn(i);
        });
    }
    for (auto& th : threads) th.join();
}

}  // namespace fishsim
