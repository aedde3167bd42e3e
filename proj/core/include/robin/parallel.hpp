#pragma once

#include <cstddef>
#include <functional>

namespace robin {

/// Runs fn(i) for i in [0, n) on up to `jobs` worker threads (serial when
/// jobs <= 1). fn must only write per-index state; results are then independent
/// of the scheduling, which keeps seeded experiment output identical for any
/// jobs value. The first exception thrown by fn is rethrown after all workers
/// finish.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace robin
