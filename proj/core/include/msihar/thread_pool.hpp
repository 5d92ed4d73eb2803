#pragma once

#include <cstddef>
#include <functional>

namespace msihar {

// Number of threads the pool was sized with (MSIHAR_THREADS env override,
// otherwise hardware concurrency).
int worker_count();

// Runs fn(0..n-1), each index exactly once, spreading work across the pool.
// Callers own determinism by writing results into per-index slots. Nested
// calls from inside a worker run inline. The first exception thrown by fn is
// rethrown on the calling thread after all work finishes.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace msihar
