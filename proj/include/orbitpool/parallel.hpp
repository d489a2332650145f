/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstddef>
#include <functional>

namespace orbitpool {

/// Worker count from ORBITPOOL_THREADS; unset or 0 means the hardware count.
std::size_t worker_count();

/// Runs fn(0..n-1) on up to `threads` workers (0 = worker_count()). The first
/// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t threads = 0);

}  // namespace orbitpool
