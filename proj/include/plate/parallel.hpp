#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace plate {

/// Selects between the serial reference loops and the OpenMP kernels.
/// Both paths write into per-entity slots and reduce serially afterwards,
/// so their results are bitwise identical.
enum class Execution { serial, parallel };

inline void set_num_threads(int n) {
#ifdef _OPENMP
  if (n > 0)
    omp_set_num_threads(n);
#else
  (void)n;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <class F>
void for_each_index(Execution exec, std::ptrdiff_t count, F&& body) {
  if (exec == Execution::serial) {
    for (std::ptrdiff_t i = 0; i < count; ++i)
      body(i);
    return;
  }
  // exceptions must not escape an OpenMP region
  std::exception_ptr error;
  std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error)
        error = std::current_exception();
    }
  }
  if (error)
    std::rethrow_exception(error);
}

} // namespace plate
