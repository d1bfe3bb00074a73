#pragma once

#include <cstddef>
#include <functional>

namespace imcv {

/// Worker count: IMCVERIFY_THREADS if set and positive, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Run body(i) for i in [0, n) on up to worker_count() threads. Each index
/// is handled exactly once; the first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace imcv
