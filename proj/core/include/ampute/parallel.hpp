#ifndef AMPUTE_PARALLEL_HPP
#define AMPUTE_PARALLEL_HPP

#include <functional>
#include <thread>
#include <vector>

namespace ampute {

/// Run fn(begin, end) over a partition of [0, n). With threads <= 1 the call
/// is inline. Work items must be independent; determinism is the caller's
/// responsibility (per-index RNG substreams make it automatic).
inline void parallel_for(int n, int threads, const std::function<void(int, int)>& fn) {
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        fn(0, n);
        return;
    }
    const int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(fn, begin, end);
    }
    for (auto& t : pool) t.join();
}

} // namespace ampute

#endif // AMPUTE_PARALLEL_HPP
