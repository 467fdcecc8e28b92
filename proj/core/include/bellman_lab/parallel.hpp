#pragma once

#include <cstddef>
#include <functional>

namespace bellman_lab {

/// Environment variable capping worker threads.
inline constexpr const char* kThreadsEnv = "BELLMAN_LAB_THREADS";

/**
 * Worker count: `requested` when positive, otherwise BELLMAN_LAB_THREADS when
 * it holds a positive integer, otherwise the hardware concurrency (at least 1).
 */
int resolve_thread_count(int requested = 0);

/// Calls body(i) for i in [0, n) on up to `threads` workers; rethrows the first failure.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace bellman_lab
