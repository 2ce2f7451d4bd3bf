#pragma once
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace heatlab {

// Effective worker count: OpenMP's default, capped by HEATLAB_THREADS if set.
inline int thread_count() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
    if (const char* cap = std::getenv("HEATLAB_THREADS")) {
        int c = std::atoi(cap);
        if (c > 0 && c < n) n = c;
    }
    return n;
#else
    return 1;
#endif
}

} // namespace heatlab
