#pragma once

#include <cstddef>
#include <functional>

namespace fraglab {

// FRAGLAB_THREADS caps worker count; defaults to hardware concurrency.
int thread_budget();

// Runs fn(i) for i in [0, n) across up to thread_budget() workers. Callers
// write results into preallocated per-index slots so the merge order never
// affects output. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace fraglab
