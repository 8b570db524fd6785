#pragma once

#include <cstddef>
#include <functional>

namespace roaflow {

/// Resolves a worker count: `requested` if positive, else the
/// ROAFLOW_THREADS environment variable, else hardware concurrency.
[[nodiscard]] int resolve_thread_count(int requested = 0);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// visited exactly once; results must be written to per-index slots. The
/// first exception thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace roaflow
