#pragma once

#include <cstddef>
#include <functional>

namespace focklab {

// Worker count: FOCKLAB_THREADS if set (>=1), otherwise hardware concurrency.
int max_threads();

// Splits [0, n) into contiguous chunks and runs fn(begin, end) on worker
// threads. fn must write only to disjoint output slots; results are then
// independent of the thread count.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace focklab
