#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace restrictlab {

// Splits [0, n) into `threads` contiguous chunks and runs fn(chunk, begin, end)
// for each. Chunk boundaries depend only on (n, threads), so callers that
// concatenate per-chunk outputs in chunk order get thread-count-independent results.
template <class Fn>
void parallel_chunks(std::size_t threads, std::size_t n, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads <= 1) {
    if (n) fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t c = 0; c < threads; ++c) {
    std::size_t begin = n * c / threads, end = n * (c + 1) / threads;
    pool.emplace_back([&, c, begin, end] {
      try {
        fn(c, begin, end);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace restrictlab
