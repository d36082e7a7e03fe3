#pragma once

#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>

namespace sladr {

/// Worker count used by parallel loops (OpenMP when available).
int thread_count();
/// Sets the worker count; k <= 0 restores the machine default.
void set_thread_count(int k);

/// Runs body(i) for i in [0, n). If any iteration throws, the exception of
/// the lowest failing index is rethrown after the loop finishes, so error
/// reporting does not depend on scheduling.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr first;
  std::size_t first_index = std::numeric_limits<std::size_t>::max();
  std::mutex guard;
  const auto count = static_cast<long long>(n);
#if defined(_OPENMP)
#pragma omp parallel for schedule(static) num_threads(thread_count())
#endif
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(guard);
      if (static_cast<std::size_t>(i) < first_index) {
        first_index = static_cast<std::size_t>(i);
        first = std::current_exception();
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace sladr
