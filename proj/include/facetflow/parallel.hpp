#pragma once

#include <cstddef>
#include <functional>

namespace facetflow {

// Worker count: hardware concurrency capped by the FACETFLOW_THREADS
// environment variable (read once).
int max_threads();

// Runs fn(chunk, begin, end) over a fixed partition of [0, n) into n_chunks
// pieces. The partition depends only on (n, n_chunks), never on the thread
// count, so reducing per-chunk results in chunk order is deterministic.
void parallel_chunks(std::ptrdiff_t n, int n_chunks,
                     const std::function<void(int, std::ptrdiff_t, std::ptrdiff_t)>& fn);

int default_chunks(std::ptrdiff_t n);

}  // namespace facetflow
