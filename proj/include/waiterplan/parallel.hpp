#pragma once

#include <functional>

namespace waiterplan {

/// Worker count: WAITERPLAN_THREADS if set, else hardware concurrency.
int worker_count();

/// Run fn(0..n-1), possibly across threads. fn must be safe to call
/// concurrently for distinct indices; the first thrown exception is
/// rethrown on the caller.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace waiterplan
