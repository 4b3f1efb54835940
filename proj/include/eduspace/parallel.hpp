#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace eduspace {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(block_index, begin, end) for every fixed-size block of [0, n).
/// Block boundaries depend only on n and block_size, so per-block results can
/// be reduced in block order for output independent of the worker count.
template <typename Fn>
void for_each_block(int64_t n, int64_t block_size, int threads, Fn&& fn) {
  if (n <= 0) return;
  if (block_size <= 0) block_size = n;
  const int64_t n_blocks = (n + block_size - 1) / block_size;
  threads = resolve_threads(threads);
  if (threads <= 1 || n_blocks <= 1) {
    for (int64_t b = 0; b < n_blocks; ++b) {
      fn(b, b * block_size, std::min(n, (b + 1) * block_size));
    }
    return;
  }
  const int workers = static_cast<int>(std::min<int64_t>(threads, n_blocks));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int64_t b = w; b < n_blocks; b += workers) {
        fn(b, b * block_size, std::min(n, (b + 1) * block_size));
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace eduspace
