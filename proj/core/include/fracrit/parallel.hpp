#pragma once

#include <cstddef>
#include <functional>

namespace fracrit {

// Worker count used by coarse-grained parallel loops (multistart runs,
// concentration search, path node gradients). Defaults to 1.
void set_thread_count(int n);
int thread_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous blocks; callers
// write results into preallocated slots so combination order never depends
// on scheduling. Exceptions from workers are rethrown (lowest index first).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace fracrit
