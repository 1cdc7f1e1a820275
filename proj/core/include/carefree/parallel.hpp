#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace carefree {

/// Environment variable consulted when no explicit thread count is given.
inline constexpr const char* kThreadsEnvVar = "CAREFREE_THREADS";

/// Explicit request (> 0) wins, then CAREFREE_THREADS, then the hardware
/// concurrency. Always returns at least 1.
unsigned resolve_threads(unsigned requested);

/// Runs fn(block) for every block in [0, n_blocks) on up to `threads` workers.
/// Blocks are claimed dynamically; callers must make per-block results
/// independent of which worker ran them. The first exception is rethrown.
template <class Fn>
void parallel_for_blocks(std::size_t n_blocks, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1U, threads), n_blocks);
  if (workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) {
      try {
        fn(b);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_blocks);
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace carefree
