#pragma once

#include <cstddef>
#include <functional>

namespace hyplab {

/// Worker count: HYPLAB_WORKERS if set and positive, else the hardware
/// concurrency (at least 1).
int worker_count();

/// Calls body(i) for i in [0, n) on up to worker_count() threads. Each index
/// runs exactly once; results must be written to per-index slots so the
/// outcome does not depend on scheduling. The first exception thrown by any
/// body is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hyplab
