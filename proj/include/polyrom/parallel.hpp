#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace polyrom {

// Global worker count used by the parallel maps below. 1 = fully serial
// (the CLI --serial flag), 0 = use hardware concurrency.
void set_thread_count(int n);
int thread_count();

// Runs fn(i) for i in [begin, end). Work is split into contiguous chunks that
// are merged back in chunk order, so results written by index are identical to
// a serial run.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

// The contiguous chunks parallel_for would use for [begin, end). Exposed so
// callers can keep one buffer per chunk and concatenate in chunk order.
std::vector<std::pair<std::size_t, std::size_t>> chunk_ranges(std::size_t begin,
                                                              std::size_t end);

// Runs fn(chunk_index, lo, hi) over chunk_ranges(begin, end) in parallel.
void parallel_chunks(
    std::size_t begin, std::size_t end,
    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace polyrom
