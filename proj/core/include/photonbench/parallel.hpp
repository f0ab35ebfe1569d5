#pragma once

#include <cstddef>
#include <functional>

namespace photonbench {

/// Worker count: `requested` if non-zero, else hardware concurrency, capped
/// by the PHOTONBENCH_THREADS environment variable when set.
unsigned worker_count(unsigned requested = 0);

/// Runs task(i) for i in [0, n_tasks) on up to `workers` threads. Tasks must
/// write to disjoint outputs; the first exception thrown is rethrown.
void parallel_for(std::size_t n_tasks, unsigned workers,
                  const std::function<void(std::size_t)>& task);

}  // namespace photonbench
