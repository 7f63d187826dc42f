#pragma once

#include <cstddef>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace purecert {

// Data-parallel loop over [0, n). Each iteration must be independent; callers
// write results into pre-sized arrays indexed by i and reduce serially
// afterwards, so output bytes do not depend on the worker count.
template <typename F>
void parallel_for(std::size_t n, F&& body, bool parallel = true) {
#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            body(static_cast<std::size_t>(i));
        }
        return;
    }
#endif
    (void)parallel;
    for (std::size_t i = 0; i < n; ++i) body(i);
}

inline void set_worker_count(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

inline int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace purecert
