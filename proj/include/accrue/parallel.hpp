#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace accrue {

/// Runs fn(i) for every i in [0, n) using up to `jobs` worker threads.
/// Callers key results by i into preallocated slots, so completion order
/// never matters. The first exception thrown by any task is rethrown here
/// after all workers finish.
inline void parallel_for(std::size_t n, std::size_t jobs,
                         const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = 1;
  if (jobs == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t workers = jobs < n ? jobs : n;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace accrue
