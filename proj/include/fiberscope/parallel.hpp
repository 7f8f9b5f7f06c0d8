#pragma once

#include <cstddef>
#include <functional>

namespace fiberscope {

// Worker count: FIBERSCOPE_THREADS if set and > 0, otherwise hardware concurrency.
std::size_t worker_count();

// Runs body(i) for i in [0, count). Each index is handled by exactly one worker, so bodies
// that write only to slot i give results independent of the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace fiberscope
