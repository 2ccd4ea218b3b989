#pragma once

#include <cstddef>
#include <vector>

namespace qbat {

/// Worker count for the parallel kernels: QSLBATTERY_THREADS when set to a
/// positive integer, otherwise the machine parallelism.
int worker_count();

namespace detail {

/// OpenMP map over [0, n) writing independent slots. A body that throws is
/// re-run serially at the lowest failing index so callers always see the
/// same exception an all-serial evaluation would produce first.
template <typename Fn>
void parallel_index_map(std::size_t n, bool parallel, Fn&& fn) {
    if (!parallel) {
        for (std::size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    std::vector<unsigned char> failed(n, 0);
    const int workers = worker_count();
    (void)workers;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(workers)
#endif
    for (long long k = 0; k < static_cast<long long>(n); ++k) {
        try {
            fn(static_cast<std::size_t>(k));
        } catch (...) {
            failed[static_cast<std::size_t>(k)] = 1;
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (failed[k]) fn(k);  // rethrows deterministically
    }
}

} // namespace detail
} // namespace qbat
