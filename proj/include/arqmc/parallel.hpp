#pragma once

#include <cstddef>
#include <functional>

namespace arqmc {

// Runs body(0..count-1) on up to `threads` workers (0 = hardware concurrency).
// Work items must not depend on execution order; the first exception (by item
// index) is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

unsigned resolve_threads(unsigned threads);

}  // namespace arqmc
