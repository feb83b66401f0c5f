#pragma once

#include <cstddef>
#include <functional>

namespace phibvp {

/// Worker count from PHI_BVP_THREADS (unset or 0 means hardware concurrency).
std::size_t worker_count();

/// Runs fn(0..n-1) on up to worker_count() threads. Each index is processed
/// exactly once; the first exception thrown by any call is rethrown here.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace phibvp
