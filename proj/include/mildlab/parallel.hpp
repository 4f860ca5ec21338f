#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace mildlab {

/// Default worker count: available hardware parallelism, at least 1.
inline std::size_t default_workers() { return std::max<std::size_t>(1, std::thread::hardware_concurrency()); }

/// Evaluates fn(0..count-1) on up to `workers` threads. Results are stored by
/// index, so the output never depends on scheduling. The first exception
/// thrown by any task is rethrown after all workers have joined.
template <class Fn>
auto parallel_map(std::size_t count, std::size_t workers, const Fn& fn) {
    using R = decltype(fn(std::size_t{}));
    std::vector<std::optional<R>> slots(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    const std::size_t n_threads = std::min(std::max<std::size_t>(workers, 1), std::max<std::size_t>(count, 1));
    if (n_threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    std::vector<R> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace mildlab
