#pragma once

#include <cstddef>
#include <functional>

namespace amplab::harness {

// Runs fn(0..count-1) on at most `jobs` threads. Jobs must not share
// mutable state; callers store results by index. After a failure no new
// jobs start; the first exception (by job index) is rethrown once all
// workers finish.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace amplab::harness
