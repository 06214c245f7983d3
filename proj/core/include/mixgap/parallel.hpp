#pragma once

#include <cstddef>
#include <functional>

namespace mixgap {

// Worker count: MIXGAP_THREADS if set (>=1), else hardware concurrency.
unsigned worker_count();

// Static partition of [0, n) into contiguous chunks, one per worker.
// fn(begin, end) must only write worker-local or disjoint state; results
// are then independent of the partition, keeping parallel runs bit-identical
// to sequential ones.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace mixgap
