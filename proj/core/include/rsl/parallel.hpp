#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rsl {

// Work is always cut into fixed-size blocks, each with its own random
// stream, so the worker count affects wall time only.
inline constexpr std::size_t kBlockSize = 1u << 14;

inline std::size_t block_count(std::size_t n, std::size_t block = kBlockSize) {
  return (n + block - 1) / block;
}

// Calls fn(block_index) for every block in [0, n_blocks) on up to `workers`
// threads. The first exception thrown by any block is rethrown on the caller.
template <class Fn>
void for_each_block(std::size_t n_blocks, unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || n_blocks <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      try {
        fn(b);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_blocks);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n_threads = static_cast<unsigned>(std::min<std::size_t>(workers, n_blocks));
  pool.reserve(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace rsl
