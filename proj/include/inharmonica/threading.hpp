#pragma once

#include <cstddef>
#include <functional>

namespace inharmonica {

// Worker count: explicit request, else the INHARMONICA_THREADS environment
// variable, else hardware concurrency.
std::size_t resolve_thread_count(std::size_t requested);

// Runs body(0..count-1) on up to n_threads workers with a static stride
// partition. Results must be written to per-index slots by the caller; the
// partition is deterministic but completion order is not. The first exception
// thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t n_threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace inharmonica
