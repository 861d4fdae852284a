#pragma once

#include <cstddef>
#include <exception>

#include "treespark/kernels.hpp"

namespace treespark::detail {

// Runs body(i) for i in [0, count) across the kernel thread budget. The
// first exception thrown by any iteration is rethrown after the loop.
template <class Body>
void for_each_trial(std::size_t count, Body&& body) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(kernels::max_threads())
  for (std::size_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(treespark_trial_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace treespark::detail
