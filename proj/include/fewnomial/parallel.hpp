#pragma once

#include <cstddef>
#include <functional>

namespace fewnomial {

/// Worker count from FEWNOMIAL_THREADS, else hardware concurrency (>= 1).
unsigned default_workers();

/// Calls body(i) for i in [0, count) on `workers` threads. Indices are
/// distributed in contiguous blocks; the first exception thrown is rethrown.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace fewnomial
