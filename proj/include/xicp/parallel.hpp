#pragma once

#include <cstddef>

namespace xicp {

/// Execution policy for the data-parallel kernels. Parallel loops only ever
/// write to disjoint output slots, so both policies produce bitwise-identical
/// results; reductions are always accumulated serially in index order.
enum class Exec { Serial, Parallel };

/// Process-wide default policy: Parallel when built with OpenMP, unless the
/// environment variable XICP_SERIAL is set to a non-empty value.
Exec default_exec();
void set_default_exec(Exec exec);

template <typename F>
void parallel_for(std::ptrdiff_t n, F&& body, Exec exec) {
  if (exec == Exec::Parallel) {
#ifdef XICP_HAS_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      body(i);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      body(i);
    }
  }
}

template <typename F>
void parallel_for(std::ptrdiff_t n, F&& body) {
  parallel_for(n, static_cast<F&&>(body), default_exec());
}

}  // namespace xicp
