#pragma once

#include <cstddef>
#include <exception>

namespace pemi {

enum class Execution { serial, parallel };

/// Runs f(i) for i in [0, n). The parallel form distributes indices over
/// OpenMP threads; exceptions thrown by f are captured and the first one is
/// rethrown after the loop. Callers must make f(i) write only to slot i so
/// that results do not depend on scheduling.
template <class F>
void for_each_index(std::size_t n, Execution exec, F&& f) {
  if (exec == Execution::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(pemi_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace pemi
