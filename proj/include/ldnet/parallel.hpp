#pragma once

#include "ldnet/types.hpp"

#include <functional>

namespace ldnet {

/// Runs fn(0..n-1) on up to jobs threads. Work items must be independent;
/// results must be written to per-index slots so that the outcome does not
/// depend on the thread count. jobs <= 1 runs serially. The first exception
/// thrown by any item is rethrown after all threads join.
void parallel_for(Index n, int jobs, const std::function<void(Index)>& fn);

}  // namespace ldnet
