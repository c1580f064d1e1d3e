#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace bvlab {

/// Runs body(i) for i in [0, count) across the OpenMP team.
///
/// Exceptions cannot cross an OpenMP region boundary, so the first one thrown
/// by any iteration is captured and rethrown on the calling thread once the
/// loop has drained. Iterations must write to disjoint outputs.
template <typename Body>
void parallel_for(std::ptrdiff_t count, Body&& body, bool dynamic = false) {
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto guarded = [&](std::ptrdiff_t i) {
        try {
            body(i);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    if (dynamic) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < count; ++i) guarded(i);
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < count; ++i) guarded(i);
    }
    if (failure) std::rethrow_exception(failure);
}

/// Sets the OpenMP team size; 0 leaves the runtime default.
inline void set_thread_count(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace bvlab
