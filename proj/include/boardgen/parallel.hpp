#pragma once

#include <cstddef>
#include <functional>

namespace boardgen {

/// Number of worker threads for a request: `requested` if positive,
/// otherwise the hardware concurrency (at least 1).
int resolveThreads(int requested);

/// Calls body(i) for every i in [0, n) on up to `threads` workers. Each index
/// runs exactly once; if any call throws, the exception of the lowest index
/// is rethrown after all workers finish.
void parallelFor(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace boardgen
