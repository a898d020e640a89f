#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mrkc {

/// Execution policy for the data-parallel kernels. Every kernel that accepts
/// an Exec produces identical results for seq and par: iterations are
/// independent and each writes its own slot, so the serial path doubles as
/// the reference implementation in tests.
enum class Exec { seq, par };

template <class Body>
void parallel_for(std::int64_t n, Exec exec, Body&& body) {
#ifdef _OPENMP
    if (exec == Exec::par) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
#else
    (void)exec;
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        body(i);
    }
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace mrkc
