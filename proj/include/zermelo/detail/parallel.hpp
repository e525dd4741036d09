#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace zermelo::detail {

// Exceptions must not cross an OpenMP region boundary: the first one thrown by
// any iteration is captured and rethrown on the calling thread.
class ExceptionSlot {
 public:
  template <class Fn>
  void run(Fn &&fn) noexcept {
    try {
      fn();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

template <class Fn>
void parallel_for(std::ptrdiff_t n, Fn &&body) {
  ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) slot.run([&] { body(i); });
  slot.rethrow();
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace zermelo::detail
