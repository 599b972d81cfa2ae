#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace vpd {

inline unsigned default_jobs() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

/// Runs fn(begin, end) over [0, count) split into fixed-size chunks handed to
/// a small worker pool. The chunk layout depends only on `count`, never on the
/// number of workers, so chunkwise reductions merge in a thread-count-
/// independent order.
inline void parallel_chunks(std::size_t count, unsigned jobs,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& fn,
                            std::size_t n_chunks = 0) {
    if (count == 0) return;
    if (n_chunks == 0) n_chunks = std::min<std::size_t>(count, 64);
    std::size_t chunk = (count + n_chunks - 1) / n_chunks;
    n_chunks = (count + chunk - 1) / chunk;

    if (jobs <= 1 || n_chunks == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            fn(c, c * chunk, std::min(count, (c + 1) * chunk));
        return;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    unsigned n_threads = std::min<std::size_t>(jobs, n_chunks);
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t c = next.fetch_add(1);
                if (c >= n_chunks) return;
                fn(c, c * chunk, std::min(count, (c + 1) * chunk));
            }
        });
    }
    for (auto& th : pool) th.join();
}

/// Element-wise parallel loop; fn(i) for i in [0, count).
inline void parallel_for(std::size_t count, unsigned jobs,
                         const std::function<void(std::size_t)>& fn) {
    parallel_chunks(count, jobs, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) fn(i);
    });
}

}  // namespace vpd
