#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace mrflow {

/// Runs body(begin, end) over fixed contiguous chunks of [0, n). Chunking
/// depends only on (n, nthreads), and bodies must write disjoint data, so
/// results are bitwise independent of scheduling. nthreads <= 1 runs inline.
inline void parallel_for(long n, int nthreads, const std::function<void(long, long)>& body) {
    if (n <= 0) return;
    if (nthreads <= 1 || n == 1) {
        body(0, n);
        return;
    }
    const long nt = std::min<long>(nthreads, n);
    const long chunk = (n + nt - 1) / nt;
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nt));
    workers.reserve(static_cast<std::size_t>(nt) - 1);
    for (long t = 1; t < nt; ++t) {
        const long lo = t * chunk;
        const long hi = std::min(n, lo + chunk);
        workers.emplace_back([&, t, lo, hi] {
            try {
                if (lo < hi) body(lo, hi);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    try {
        body(0, std::min(n, chunk));
    } catch (...) {
        errors[0] = std::current_exception();
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace mrflow
