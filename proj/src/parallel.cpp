#include "sfpe/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace sfpe {

int thread_count() {
    // Re-read each call so a process can sweep thread counts; the work
    // partition never depends on this value, only the worker pool size.
    if (const char* env = std::getenv("SFPE_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

std::size_t chunk_size(std::size_t n) {
    // Fixed fan-out of 64 chunks keeps the partition independent of the
    // thread count while still load-balancing uneven work.
    std::size_t c = (n + 63) / 64;
    return std::max<std::size_t>(c, 1);
}

std::size_t chunk_count(std::size_t n) {
    if (n == 0) return 0;
    std::size_t c = chunk_size(n);
    return (n + c - 1) / c;
}

void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    const int workers = std::min<std::size_t>(thread_count(), chunk_count(n));
    if (workers <= 1) {
        body(0, n);
        return;
    }
    const std::size_t cs = chunk_size(n);
    const std::size_t nchunks = chunk_count(n);
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= nchunks) break;
            std::size_t lo = c * cs;
            std::size_t hi = std::min(lo + cs, n);
            body(lo, hi);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int i = 1; i < workers; ++i) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    parallel_chunks(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) body(i);
    });
}

}  // namespace sfpe
