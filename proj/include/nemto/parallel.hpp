#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace nemto {

/// Number of worker threads: hardware concurrency, capped by NEMTO_THREADS.
inline int worker_count() {
    int n = int(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("NEMTO_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0 && cap < n) n = cap;
    }
    return n;
}

/// Splits [0, n) into fixed chunks of chunk_size and runs fn(chunk_index, begin, end)
/// for each. Chunks are claimed dynamically but each chunk is processed whole by a
/// single worker, so anything accumulated per chunk is independent of the thread
/// count and schedule.
inline void parallel_chunks(size_t n, size_t chunk_size,
                            const std::function<void(size_t, size_t, size_t)>& fn) {
    if (n == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const size_t num_chunks = (n + chunk_size - 1) / chunk_size;
    const int workers = std::min<size_t>(worker_count(), num_chunks);

    if (workers <= 1) {
        for (size_t c = 0; c < num_chunks; ++c)
            fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        return;
    }

    std::atomic<size_t> next{0};
    auto run = [&] {
        for (;;) {
            size_t c = next.fetch_add(1, std::memory_order_relaxed);
            if (c >= num_chunks) break;
            fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int i = 0; i < workers - 1; ++i) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
}

/// Element-wise parallel loop; outputs must go to disjoint slots.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    size_t chunk = std::max<size_t>(1, n / (size_t(worker_count()) * 8));
    parallel_chunks(n, chunk, [&](size_t, size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) fn(i);
    });
}

}  // namespace nemto
