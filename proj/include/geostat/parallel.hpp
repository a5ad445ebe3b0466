#pragma once

#include <cstddef>
#include <functional>

namespace geostat {

// Worker count: GEOSTAT_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t thread_count();

// Calls fn(i) for every i in [0, n). Each index is visited exactly once, so
// callers that write only to slot i get results independent of scheduling.
// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace geostat
