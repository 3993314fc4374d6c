#pragma once

#include <omp.h>

namespace sle {

inline int resolve_workers(int workers) {
  return workers > 0 ? workers : omp_get_max_threads();
}

}  // namespace sle
