#pragma once

#include <exception>

namespace binci {

/// Runs f(i) for i in [0, count). Slots must be independent: each call writes
/// only its own output. With `parallel` set and OpenMP available the loop is
/// distributed over threads; results are identical to the serial loop because
/// no iteration reads another's output.
template <class F>
void for_each_index(int count, bool parallel, F&& f) {
#ifdef _OPENMP
  if (parallel) {
    std::exception_ptr err = nullptr;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
      try {
        f(i);
      } catch (...) {
#pragma omp critical(binci_for_each_index_err)
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#else
  (void)parallel;
#endif
  for (int i = 0; i < count; ++i) f(i);
}

}  // namespace binci
