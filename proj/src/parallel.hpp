#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace tsdistill {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Errors are captured
/// per index; with stop_on_error, no new indices start after the first one.
template <class Fn>
std::vector<std::exception_ptr> parallel_for(std::size_t n, int jobs, Fn&& fn,
                                             bool stop_on_error = false) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      if (stop_on_error && failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (threads <= 1) {
    worker();
    return errors;
  }
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return errors;
}

}  // namespace tsdistill
