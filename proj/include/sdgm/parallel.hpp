#pragma once

#include <Eigen/Core>

#include <exception>

namespace sdgm {

/// Element loops run serially below this many elements; thread start-up
/// would dominate otherwise.
inline constexpr Eigen::Index kParallelMinElements = 64;

/// Sets the worker count for element loops. n <= 0 restores the default
/// (all available cores). No-op without OpenMP.
void set_num_threads(int n);
[[nodiscard]] int num_threads();
[[nodiscard]] bool parallel_enabled();

/// body(i) for i in [0, n), in parallel when n is large enough. The first
/// exception thrown by any iteration is rethrown on the calling thread.
template <typename Body>
void parallel_for(Eigen::Index n, Body&& body)
{
    std::exception_ptr error;
#pragma omp parallel for schedule(static) if (n >= kParallelMinElements)
    for (Eigen::Index i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical(sdgm_parallel_for_error)
            if (!error) {
                error = std::current_exception();
            }
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace sdgm
