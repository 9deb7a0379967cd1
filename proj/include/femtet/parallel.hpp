#pragma once

#include <cstddef>
#include <functional>

namespace femtet {

/// Worker count: hardware concurrency, capped by the FEMTET_THREADS
/// environment variable when it holds a positive integer.
int thread_count();

/// Splits [0, n) into at most thread_count() contiguous chunks and runs
/// body(chunk, begin, end) for each, concurrently. Returns the chunk count.
/// Chunk c always covers a lower range than chunk c + 1. If chunks throw, the
/// exception of the lowest such chunk is rethrown after all chunks finish.
int parallel_chunks(
    std::size_t n,
    const std::function<void(int, std::size_t, std::size_t)>& body,
    std::size_t min_chunk = 256);

}  // namespace femtet
