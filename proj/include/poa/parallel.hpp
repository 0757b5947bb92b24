#pragma once

#include <cstddef>
#include <functional>

namespace poa {

// Worker count: POA_PHASES_THREADS when set to a positive integer, else the
// hardware concurrency.
std::size_t worker_count();

// Runs body(i) for i in [0, n) on up to worker_count() threads. The first
// exception thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace poa
