#pragma once

#include <cstddef>
#include <functional>

namespace m3sim {

/// Worker cap from M3SIM_THREADS; falls back to hardware concurrency (min 1).
std::size_t thread_limit();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// processed exactly once; callers write results into per-index slots so the
/// output never depends on scheduling. Rethrows the first exception by index.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t threads = thread_limit());

}  // namespace m3sim
