#pragma once

#include <functional>

namespace polyhybrid
{

/// Splits [0, n) into one contiguous chunk per worker and runs them concurrently.
/// The callback receives (worker, begin, end); worker count is clamped to [1, n].
void parallel_for(int n, int threads, const std::function<void(int, int, int)>& body);

} // namespace polyhybrid
