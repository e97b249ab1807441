#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sumset {

// Runs fn(0), ..., fn(count-1), distributing indices over up to `workers`
// threads via an atomic work counter.
//
// Determinism contract: fn(i) must depend only on i and write only to
// slot i of preallocated storage.  Under that contract the result is
// byte-identical for every worker count and every scheduling order.  The
// first exception thrown by any body is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    if (count == 0) return;
    const std::size_t nw = std::min<std::size_t>(workers < 1 ? 1 : static_cast<std::size_t>(workers), count);
    if (nw == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto drain = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
                next.store(count, std::memory_order_relaxed);  // stop handing out work
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (std::size_t t = 0; t < nw; ++t) pool.emplace_back(drain);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sumset
