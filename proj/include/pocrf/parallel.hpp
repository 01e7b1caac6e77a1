#ifndef POCRF_PARALLEL_HPP
#define POCRF_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace pocrf {

// POCRF_THREADS if set and positive, else the hardware concurrency.
inline int default_thread_count() {
  if (const char* env = std::getenv("POCRF_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Splits [0, count) into at most `threads` contiguous chunks and runs
// fn(begin, end) on each. Chunk boundaries depend only on count and
// threads; the first exception thrown by any chunk is rethrown.
template <typename Fn>
void parallel_chunks(int count, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads <= 1) {
    if (count > 0) fn(0, count);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    const int begin = static_cast<int>(static_cast<long long>(count) * t / threads);
    const int end = static_cast<int>(static_cast<long long>(count) * (t + 1) / threads);
    pool.emplace_back([&, t, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace pocrf

#endif  // POCRF_PARALLEL_HPP
