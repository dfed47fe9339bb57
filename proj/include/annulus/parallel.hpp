#pragma once
#include <functional>

namespace annulus {

// Worker count: ANNULUS_ROTOR_THREADS if set, else hardware concurrency.
int thread_count();

// Runs body(i) for i in [0, n), split in contiguous chunks across threads.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace annulus
