#pragma once

#include <cstddef>
#include <functional>

namespace sfpe {

// Worker count, read once from SFPE_THREADS (defaults to hardware concurrency).
int thread_count();

// Splits [0, n) into contiguous chunks and runs them on the worker pool.
// Chunk boundaries depend only on n, never on the thread count, and every
// chunk writes through its own indices, so results are bitwise identical
// at any SFPE_THREADS setting.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t begin, std::size_t end)>& body);

// Per-index convenience wrapper over parallel_chunks.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Chunk size used by parallel_chunks; exposed so reductions can allocate
// one partial slot per chunk and combine them in chunk order.
std::size_t chunk_size(std::size_t n);
std::size_t chunk_count(std::size_t n);

}  // namespace sfpe
