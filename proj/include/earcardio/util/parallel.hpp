#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace earcardio::par {

// Global switch between the OpenMP kernels and their serial reference path.
// Every parallel loop in the project writes to disjoint slots and reduces in a
// fixed order, so both paths produce bit-identical results; the tests assert
// this and the bench tool compares their throughput.
inline bool& parallel_enabled() {
    static bool enabled = true;
    return enabled;
}

inline void set_parallel(bool on) { parallel_enabled() = on; }

inline int max_threads() {
#ifdef _OPENMP
    return parallel_enabled() ? omp_get_max_threads() : 1;
#else
    return 1;
#endif
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
#ifdef _OPENMP
    if (parallel_enabled() && n > 1) {
        #pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            fn(static_cast<std::size_t>(i));
        }
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

} // namespace earcardio::par
