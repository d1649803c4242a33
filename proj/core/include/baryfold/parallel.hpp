#pragma once

#include <cstddef>
#include <functional>

namespace baryfold {

/// Number of worker threads used by parallel_for: hardware concurrency,
/// capped by the BARYFOLD_THREADS environment variable when set.
int thread_count();

/// Deterministic index-space parallel loop.  fn(i) must write only to slots
/// owned by index i; results are then independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace baryfold
