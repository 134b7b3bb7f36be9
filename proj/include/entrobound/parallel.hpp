#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace entrobound {

//! Worker count: ENTROBOUND_THREADS if set (>= 1), else hardware concurrency.
std::size_t worker_count();

/// Runs task(i) for i in [0, n) on up to worker_count() threads and returns
/// the results in index order. The first exception thrown by a task is
/// rethrown after all workers stop.
template<class T>
std::vector<T>
ordered_parallel_map(std::size_t n, const std::function<T(std::size_t)>& task);

void parallel_for_index(std::size_t n, const std::function<void(std::size_t)>& task);

template<class T>
std::vector<T>
ordered_parallel_map(std::size_t n, const std::function<T(std::size_t)>& task)
{
  std::vector<T> out(n);
  parallel_for_index(n, [&](std::size_t i) { out[i] = task(i); });
  return out;
}

} // namespace entrobound
