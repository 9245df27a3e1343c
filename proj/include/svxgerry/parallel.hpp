#pragma once

#include <functional>

namespace svxgerry {

/// Number of workers actually used for a request (0 = hardware concurrency).
int effective_threads(int requested);

/// Runs fn(i) for every i in [0, n), splitting the index range into
/// contiguous slices across workers. Each index runs exactly once and callers
/// write results into index-addressed slots, so output is identical for any
/// thread count. The first exception thrown by fn is rethrown after join.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace svxgerry
