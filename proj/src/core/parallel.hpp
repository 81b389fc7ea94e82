#pragma once

#include <cstddef>
#include <functional>

namespace roy {

/// ROY_EXACT_WORKERS if set to a positive integer, else the hardware thread
/// count (at least 1).
unsigned default_worker_count();

/// Runs body(i) for i in [0, n) on up to `workers` threads. Work is handed
/// out by index, so results written to slot i do not depend on scheduling.
/// The first exception thrown by any body is rethrown after all threads join.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace roy
