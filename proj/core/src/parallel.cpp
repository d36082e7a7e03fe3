#include "sladr/parallel.hpp"

#include <atomic>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace sladr {

namespace {
std::atomic<int> requested{0};
}

int thread_count() {
  const int k = requested.load();
  if (k > 0) return k;
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_thread_count(int k) { requested.store(k > 0 ? k : 0); }

}  // namespace sladr
