#pragma once

#include <functional>

namespace tpjc {

// 0 or negative -> hardware concurrency, clamped to [1, 64].
int resolve_threads(int requested);

// Runs fn(0..n-1) on a worker pool. Results must be written to disjoint,
// preallocated slots so the output is independent of scheduling. The first
// exception thrown by any worker is rethrown after all workers join.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace tpjc
