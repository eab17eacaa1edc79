#pragma once

// Block-deterministic parallel loop. Work is split into fixed blocks whose
// results are combined in block order, so output is bitwise independent of
// the number of worker threads. OPUCLAB_THREADS caps parallelism.

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace opuclab {

inline int thread_cap() {
    if (const char* env = std::getenv("OPUCLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs work(block) for block = 0..nblocks-1 on up to `threads` workers
/// (0 = use the cap). Each block must write only to its own slot.
inline void parallel_blocks(int nblocks, const std::function<void(int)>& work,
                            int threads = 0) {
    if (threads <= 0) threads = thread_cap();
    threads = std::min(threads, nblocks);
    if (threads <= 1) {
        for (int b = 0; b < nblocks; ++b) work(b);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (int b = next.fetch_add(1); b < nblocks; b = next.fetch_add(1)) work(b);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace opuclab
