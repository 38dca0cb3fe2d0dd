#pragma once

#include <cstdint>
#include <functional>

namespace subdiff {

/// Worker count for Monte Carlo loops: hardware concurrency, capped by the
/// SUBDIFF_THREADS environment variable when set.
int worker_count();

/// Runs fn(i) for i in [0, n) across workers. Each index is processed
/// exactly once; outputs must go to disjoint slots so the result does not
/// depend on scheduling.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

}  // namespace subdiff
