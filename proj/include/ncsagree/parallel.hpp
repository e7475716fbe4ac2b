#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace ncsagree {

inline unsigned effective_workers(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : h;
}

// Static contiguous partition of [0, n) into one chunk per worker. Callers
// must write disjoint preallocated slots; then the result is independent of
// the worker count.
inline void parallel_chunks(
    std::size_t n, unsigned workers,
    const std::function<void(std::size_t, std::size_t)>& fn) {
  workers = effective_workers(workers);
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    fn(0, n);
    return;
  }
  if (workers > n) workers = static_cast<unsigned>(n);
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  threads.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    const std::size_t begin = n * t / workers;
    const std::size_t end = n * (t + 1) / workers;
    threads.emplace_back([&fn, &errors, t, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace ncsagree
