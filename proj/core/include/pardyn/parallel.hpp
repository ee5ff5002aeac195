#pragma once

#include <functional>

namespace pardyn {

// Worker count: explicit request if positive, else the PARDYN_JOBS environment
// variable, else the hardware concurrency (at least 1).
int resolve_jobs(int requested = 0);

// Runs fn(i) for i in [0, n) across `jobs` threads. Work items are claimed from a
// shared counter; callers get determinism by writing results into index-addressed
// slots. The first exception thrown by any worker is rethrown on the caller.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace pardyn
