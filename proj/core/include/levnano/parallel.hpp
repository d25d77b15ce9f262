#pragma once

#include <cstddef>
#include <functional>

namespace levnano {

// Worker count: LEVNANO_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

// Runs body(i) for i in [0, n). Each index is handled by exactly one worker,
// so results written to per-index slots do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace levnano
