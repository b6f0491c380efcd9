#pragma once

#include <cstddef>
#include <functional>

namespace droso {

// Runs fn(i) for every i in [0, n) on up to `threads` workers (0 = machine
// parallelism). Callers must write results into disjoint, preallocated
// slots; the schedule never affects outputs. The first exception thrown by
// any worker is rethrown after all workers join.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn);

// resolves 0/negative to std::thread::hardware_concurrency
int resolve_threads(int threads);

}  // namespace droso
