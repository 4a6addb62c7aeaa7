#pragma once

#include <cstddef>
#include <functional>

namespace mgqda {

/// MGQDA_THREADS when set to a positive integer, else the hardware concurrency (at least 1).
int default_thread_count();

/*
 * Runs fn(0..n-1) on up to `threads` workers. Each index runs exactly once;
 * the first exception thrown by any call is rethrown after all workers join.
 */
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

} // namespace mgqda
