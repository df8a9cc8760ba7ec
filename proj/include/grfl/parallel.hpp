#pragma once

#include <cstddef>
#include <functional>

namespace grfl {

// Worker count: GRFL_THREADS if set (>= 1), else the hardware concurrency.
int worker_count();

// Run fn(i) for i in [0, n). Iterations must touch disjoint outputs.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace grfl
