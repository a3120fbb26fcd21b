#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace fuzzyseg {

/// Worker count requested through FUZZYSEG_THREADS (0 or unset = sequential).
unsigned threads_from_env();

/// Runs chunk_fn(begin, end) over [0, n) split into at most `threads`
/// contiguous ranges. With threads <= 1 the call is sequential. Chunk
/// boundaries depend only on (n, threads), and callers must write to
/// disjoint output slots, so results are identical for any thread count.
template <typename ChunkFn>
void parallel_for(std::size_t n, unsigned threads, ChunkFn&& chunk_fn) {
    if (n == 0) return;
    std::size_t workers = threads;
    if (workers > n) workers = n;
    if (workers <= 1) {
        chunk_fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t base = n / workers;
    const std::size_t extra = n % workers;
    std::size_t begin = 0;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t len = base + (w < extra ? 1 : 0);
        const std::size_t end = begin + len;
        pool.emplace_back([&chunk_fn, begin, end] { chunk_fn(begin, end); });
        begin = end;
    }
    for (auto& t : pool) t.join();
}

}  // namespace fuzzyseg
