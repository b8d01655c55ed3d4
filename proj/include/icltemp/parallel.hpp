#pragma once

#include <functional>

namespace icltemp {

int resolve_threads(int threads);

// Runs fn(chunk_index, begin, end) over [0, n) split into fixed-size chunks.
// Chunk boundaries depend only on n and chunk_size, never on the thread
// count, so per-chunk outputs reduced in chunk order give thread-count
// independent results.
void parallel_chunks(long n, long chunk_size, int threads,
                     const std::function<void(long, long, long)>& fn);

}  // namespace icltemp
