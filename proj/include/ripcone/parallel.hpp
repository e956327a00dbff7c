#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "ripcone/core.hpp"

namespace ripcone {

/// Runs fn(i) for i in [0, n) over contiguous chunks on hardware threads.
/// fn must only write to slot i of preallocated output; the first exception
/// thrown is rethrown on the caller.
template <class F>
void parallel_for(Index n, F&& fn) {
  const Index hw = std::max<Index>(1, static_cast<Index>(std::thread::hardware_concurrency()));
  const Index workers = std::min(hw, n);
  if (workers <= 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  const Index chunk = (n + workers - 1) / workers;
  for (Index w = 0; w < workers; ++w) {
    const Index lo = w * chunk, hi = std::min(n, lo + chunk);
    pool.emplace_back([&, lo, hi] {
      try {
        for (Index i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ripcone
