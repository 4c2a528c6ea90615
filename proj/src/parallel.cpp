#include "bgx/parallel.hpp"

#include <omp.h>

namespace bgx::parallel {

namespace {
int g_default_threads = -1;
}

void set_threads(int threads) {
  if (g_default_threads < 0) g_default_threads = omp_get_max_threads();
  omp_set_num_threads(threads > 0 ? threads : g_default_threads);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace bgx::parallel
