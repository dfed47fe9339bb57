#include "annulus/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace annulus {

int thread_count()
{
    int hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* s = std::getenv("ANNULUS_ROTOR_THREADS")) {
        int cap = std::atoi(s);
        if (cap >= 1) return std::min(cap, hw);
    }
    return hw;
}

void parallel_for(int n, const std::function<void(int)>& body)
{
    const int nt = std::min(thread_count(), n);
    if (nt <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nt);
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int i = t * n / nt; i < (t + 1) * n / nt; ++i) body(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace annulus
