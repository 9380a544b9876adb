#pragma once

#include <cstddef>
#include <functional>

namespace sgl {

// Worker cap: SGL_THREADS if set (values < 1 mean serial), otherwise
// hardware concurrency. Read once per process.
int thread_cap();

// Runs fn(i) for i in [0, count) on up to thread_cap() workers. Iteration i
// always lands in a deterministic chunk, so per-index outputs written into
// preallocated slots are reproducible regardless of the cap. The first
// exception thrown by any worker is rethrown on the caller's thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace sgl
