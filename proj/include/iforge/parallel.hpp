#pragma once

#include <cstddef>
#include <functional>

namespace iforge {

// Worker cap: IFORGE_THREADS environment variable when set and positive,
// otherwise hardware concurrency.
unsigned max_threads();

// Runs fn(i) for i in [0, n). Tasks must write only to their own slots;
// results are then independent of scheduling. Nested calls degrade to the
// calling thread so worker counts stay bounded.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace iforge
