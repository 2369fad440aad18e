#ifndef GSAUDIT_PARALLEL_HPP
#define GSAUDIT_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

/**
 * @file parallel.hpp
 * @brief Minimal deterministic work distribution.
 */

namespace gsaudit {

/**
 * Calls `fun(i)` for every `i` in `[0, n)` using up to `num_threads` threads.
 * Work items are claimed dynamically, so `fun` must write its result into a slot keyed by `i`;
 * the outcome is then independent of the thread count.
 * If items throw, the exception of the lowest-indexed failing item is rethrown after all threads join.
 */
template<class Function>
void parallel_for(std::size_t n, int num_threads, Function fun) {
    if (num_threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fun(i);
        }
        return;
    }

    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(num_threads), n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::size_t failure_index = n;
    std::mutex failure_lock;

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                auto i = next.fetch_add(1);
                if (i >= n) {
                    return;
                }
                try {
                    fun(i);
                } catch (...) {
                    std::lock_guard<std::mutex> guard(failure_lock);
                    if (i < failure_index) {
                        failure_index = i;
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}

#endif
