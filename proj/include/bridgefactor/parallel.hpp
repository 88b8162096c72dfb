#pragma once

#include <cstddef>
#include <functional>

namespace bridgefactor::parallel {

// Runs fn(i) for i in [0, count) on up to `threads` workers. Callers write
// results into preallocated index-addressed slots, so the output is
// invariant to the thread count; the first worker exception is rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace bridgefactor::parallel
