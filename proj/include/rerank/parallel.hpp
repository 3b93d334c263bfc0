#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace rerank {

// Runs fn(i) for i in [0, n) across `workers` threads. Work is dealt in
// contiguous slices, so each index runs exactly once and results written to
// index i of a caller-owned buffer land identically regardless of the worker
// count. The first exception thrown by any worker is rethrown here.
inline void parallel_for(std::size_t n, int workers,
                         const std::function<void(std::size_t)>& fn) {
  if (workers < 1) throw std::invalid_argument("parallel_for: workers must be >= 1");
  if (n == 0) return;
  const std::size_t lanes = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  if (lanes == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::vector<std::exception_ptr> errors(lanes);
  std::vector<std::thread> threads;
  threads.reserve(lanes);
  const std::size_t chunk = (n + lanes - 1) / lanes;
  for (std::size_t lane = 0; lane < lanes; ++lane) {
    threads.emplace_back([&, lane]() {
      const std::size_t begin = lane * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[lane] = std::current_exception();
      }
    });
  }
  for (std::thread& t : threads) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace rerank
