#pragma once

#include <cstddef>
#include <functional>

namespace qrelax {

// Worker count: QRELAX_THREADS when set (clamped to >= 1), otherwise the
// hardware concurrency.
int worker_count();

// Run fn(i) for i in [0, n).  Work items must be independent and write only
// to their own output slot, so results do not depend on the thread count.
// Exceptions from work items are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace qrelax
