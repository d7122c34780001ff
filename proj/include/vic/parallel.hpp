// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace vic {

/// Kernels come in two flavours: the OpenMP one used in production and a
/// plain loop kept as the reference the tests compare against.
enum class Exec { serial, parallel };

/// Runs body(i) for i in [0, n). Iterations must be independent. The first
/// exception thrown by any iteration is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t n, Exec exec, int jobs, Body&& body) {
  if (exec == Exec::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<long long>(n);
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace vic
