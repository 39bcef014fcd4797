#pragma once

#include <cstddef>
#include <functional>

namespace superatom {

// Worker count from SUPERATOM_THREADS, else hardware concurrency. Never
// affects results: callers write to index-addressed slots and reduce in
// index order.
unsigned worker_count();

// Runs body(i) for i in [0, count). Exceptions are rethrown on the caller
// thread (lowest failing index wins).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace superatom
