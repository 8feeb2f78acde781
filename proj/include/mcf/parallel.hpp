#pragma once

#include <cstddef>
#include <exception>
#include <limits>

namespace mcf {

enum class Exec { serial, parallel };

/// Runs fn(node) for node in [0, count). Each call must write only to
/// slots owned by its node. In parallel mode the exception raised by the
/// lowest failing node is rethrown after the loop, so both modes report the
/// same error.
template <class Fn>
void for_each_node(Exec exec, std::size_t count, Fn&& fn) {
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::size_t failed = std::numeric_limits<std::size_t>::max();
    std::exception_ptr error;
    const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(mcf_for_each_node)
            {
                if (static_cast<std::size_t>(i) < failed) {
                    failed = static_cast<std::size_t>(i);
                    error = std::current_exception();
                }
            }
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace mcf
