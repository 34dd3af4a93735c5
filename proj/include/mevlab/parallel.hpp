#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace mevlab {

// Worker count: REDISWAP_THREADS if set and positive, else the hardware
// concurrency (at least 1).
std::size_t worker_count();

// Calls fn(i) for i in [0, n) across worker threads. Each index runs exactly
// once; the first exception thrown is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mevlab
