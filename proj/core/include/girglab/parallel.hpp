#pragma once

#include <cstddef>
#include <functional>

namespace girglab {

// Worker count used by parallel_for. 0 means "unset": GIRG_LAB_JOBS, then
// hardware concurrency.
int job_count();
void set_job_count(int jobs);

// Calls fn(i) for i in [0, n). Blocks of indices are handed out dynamically;
// fn must only touch state owned by index i. The first exception thrown by
// any worker is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace girglab
