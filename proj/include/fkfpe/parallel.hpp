#pragma once

#ifdef FKFPE_HAVE_OPENMP
#include <omp.h>
#endif

namespace fkfpe {

/// Caps the worker count for all parallel kernels (1 = bit-reproducible
/// against the serial reference paths).
inline void set_threads(int n) {
#ifdef FKFPE_HAVE_OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

inline int max_threads() {
#ifdef FKFPE_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace fkfpe
