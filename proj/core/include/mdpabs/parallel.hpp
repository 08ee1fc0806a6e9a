#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace mdpabs {

inline int default_worker_count() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Runs fn(i) for i in [begin, end) on up to `workers` threads using static
/// contiguous chunks. Results must be written to disjoint slots keyed by i,
/// which makes the output independent of the worker count. The exception
/// thrown by the lowest index, if any, is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, int workers, Fn&& fn) {
  const std::size_t n = end > begin ? end - begin : 0;
  if (n == 0) return;
  const std::size_t nworkers =
      std::min<std::size_t>(std::max(workers, 1), n);
  if (nworkers == 1) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (n + nworkers - 1) / nworkers;
  std::vector<std::exception_ptr> errors(nworkers);
  std::vector<std::size_t> error_index(nworkers, end);
  std::vector<std::thread> pool;
  pool.reserve(nworkers);
  for (std::size_t w = 0; w < nworkers; ++w) {
    const std::size_t lo = begin + w * chunk;
    const std::size_t hi = std::min(end, lo + chunk);
    pool.emplace_back([&, w, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
          error_index[w] = i;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  std::size_t first = end;
  std::size_t which = nworkers;
  for (std::size_t w = 0; w < nworkers; ++w) {
    if (errors[w] && error_index[w] < first) {
      first = error_index[w];
      which = w;
    }
  }
  if (which < nworkers) std::rethrow_exception(errors[which]);
}

}  // namespace mdpabs
