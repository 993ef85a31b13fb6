#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace veriphoton {

/// Worker count: VERIPHOTON_THREADS when set to a positive integer, else the
/// machine's hardware concurrency.
inline int default_threads() {
    if (const char* env = std::getenv("VERIPHOTON_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count) over contiguous chunks. The first
/// exception thrown by any worker is rethrown on the caller.
template <typename Body>
void parallel_for(std::uint64_t count, int threads, Body&& body) {
    if (threads <= 0) threads = default_threads();
    const auto workers =
        static_cast<std::uint64_t>(std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), count));
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
        const std::uint64_t begin = count * w / workers;
        const std::uint64_t end = count * (w + 1) / workers;
        pool.emplace_back([&, begin, end] {
            try {
                for (std::uint64_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace veriphoton
