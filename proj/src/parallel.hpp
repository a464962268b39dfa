#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace blockcov::par {

inline int thread_count() {
    if (const char* env = std::getenv("BLOCKCOV_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, n). Work is claimed in chunks via an atomic
// counter; results must be written to per-index storage so the outcome does
// not depend on scheduling.
template <class Fn>
void parallel_for(std::int64_t n, Fn&& fn, std::int64_t chunk = 64) {
    const int workers = std::min<std::int64_t>(thread_count(), std::max<std::int64_t>(n, 1));
    if (workers <= 1 || n < 2 * chunk) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    auto body = [&]() {
        for (;;) {
            const std::int64_t lo = next.fetch_add(chunk);
            if (lo >= n) return;
            const std::int64_t hi = std::min(n, lo + chunk);
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
}

}  // namespace blockcov::par
