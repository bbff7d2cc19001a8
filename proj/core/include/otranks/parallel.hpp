#pragma once

#include <cstddef>
#include <functional>

namespace otranks {

/// Worker count: OTRANKS_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

/// Calls body(i) for every i in [0, count). Each index is processed exactly once;
/// callers write results into per-index slots so output never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace otranks
