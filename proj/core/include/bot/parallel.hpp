#pragma once

#include <cstddef>
#include <functional>

namespace bot {

/// Worker count: BOT_THREADS if set to a positive integer, else the hardware concurrency (at least 1).
unsigned worker_count();

/// Calls fn(i) for every i in [0, count) on up to `workers` threads (0 = worker_count()).
/// Indices are handed out dynamically; the first exception thrown is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, unsigned workers = 0);

}  // namespace bot
