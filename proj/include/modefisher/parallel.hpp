#pragma once

#include <cstddef>
#include <functional>

namespace modefisher {

/// Worker count: hardware concurrency, capped by MODEFISHER_THREADS when set.
std::size_t worker_count();

/// Calls body(i) for i in [0, n) on up to worker_count() threads. Each index
/// is processed exactly once; callers write results by index, so output is
/// independent of scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace modefisher
