#pragma once

#include <cstddef>
#include <functional>

namespace lowercs {

/// Thread cap from LOWERCS_THREADS; 1 when unset or invalid.
std::size_t thread_count_from_env();

/// Runs body(i) for i in [0, n) on up to `threads` threads with a static
/// partition. Callers keep results deterministic by writing to slot i only.
/// The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace lowercs
