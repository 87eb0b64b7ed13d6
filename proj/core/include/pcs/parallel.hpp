#pragma once

#include <cstddef>
#include <functional>

namespace pcs {

/// Worker count: PCS_THREADS if set and positive, else hardware concurrency (at least 1).
unsigned default_thread_count();

/// Calls fn(i) for i in [0, count) on up to `threads` workers (0 = default_thread_count()).
/// Work is split into contiguous index blocks; fn must only write to slots keyed by i.
/// The first exception thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace pcs
