#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace groom {

// Thread cap from GROOMKIT_THREADS; 0 or unset means hardware concurrency.
inline int thread_count() {
    if (const char* env = std::getenv("GROOMKIT_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? int(hc) : 1;
}

// Static block partition over [0, n). Each item may only write state owned by
// its own index, which makes the result identical for every thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    std::size_t threads = std::min<std::size_t>(std::size_t(thread_count()), n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace groom
