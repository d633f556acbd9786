#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace normsol {

// Runs fn(i) for i in [0, n) on at most `workers` threads. Results land in
// index order so output does not depend on scheduling; the first exception is
// rethrown after all workers join.
template <class T>
std::vector<T> parallel_map(std::size_t n, int workers, const std::function<T(std::size_t)>& fn) {
    std::vector<T> out(n);
    const std::size_t k = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
    if (k <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mtx;
    std::vector<std::thread> pool;
    pool.reserve(k);
    for (std::size_t w = 0; w < k; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    std::lock_guard lock(err_mtx);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    return out;
}

}  // namespace normsol
