#pragma once

#include <cstddef>
#include <functional>

namespace curvmask {

/// Worker count used by parallel loops; 0 selects the hardware concurrency.
void set_thread_count(int threads);
int thread_count();

/// Calls fn(i) for every i in [0, count). Work items are independent, so the
/// result never depends on the number of threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace curvmask
