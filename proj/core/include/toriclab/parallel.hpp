#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace toriclab {

// Runs fn(i) for i in [0, n) across up to nthreads workers. Each index is
// processed exactly once and writes only to caller-owned slot i, so the
// result is identical to the sequential order regardless of scheduling.
inline void parallel_for_index(int n, int nthreads, const std::function<void(int)>& fn) {
    if (nthreads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    nthreads = std::min(nthreads, n);
    std::vector<std::thread> workers;
    workers.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) {
        workers.emplace_back([&, t]() {
            for (int i = t; i < n; i += nthreads) fn(i);
        });
    }
    for (auto& w : workers) w.join();
}

} // namespace toriclab
