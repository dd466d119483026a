#pragma once

#include <cstddef>
#include <functional>

namespace chiral {

/// CHIRAL_GUMBEL_WORKERS if set and positive, else the hardware thread count.
int default_workers();

/// Runs fn(0) .. fn(count - 1) on up to `workers` threads. Index i always
/// writes its own result slot, so results never depend on the worker count.
/// The exception from the lowest failing index is rethrown.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace chiral
