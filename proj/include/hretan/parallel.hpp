#pragma once

#include <cstddef>
#include <functional>

namespace hretan {

// Worker count: hardware concurrency, capped by HRETAN_THREADS when set.
std::size_t worker_count();

// Runs body(i) for i in [0, n) across worker_count() threads. Each index is
// visited exactly once; callers write results to slot i so output does not
// depend on scheduling. The exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hretan
