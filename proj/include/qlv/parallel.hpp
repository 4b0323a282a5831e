#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qlv {

// Runs fn(i) for i in [0, count) across up to n_threads workers.
// Tasks are assigned by index stride, results must be written to
// index-addressed slots by the caller; output is then independent of the
// thread count. Exceptions are captured and rethrown on the caller.
template <typename Fn>
void parallel_for(std::size_t count, unsigned n_threads, Fn&& fn) {
    if (count == 0) return;
    unsigned workers = n_threads == 0 ? 1 : n_threads;
    if (workers > count) workers = static_cast<unsigned>(count);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = w; i < count; i += workers) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace qlv
