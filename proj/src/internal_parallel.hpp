#pragma once

// Internal helper: index-sharded parallel loop over [0, n). Each index is
// processed exactly once and results must be written to per-index slots, so
// the outcome is independent of the thread count and schedule. The body must
// not throw; wrap fallible work and record failures in the result slot.

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace ordrisk::internal {

inline void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (n <= 0) return;
  if (threads <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    threads = static_cast<int>(std::min(hw == 0 ? 1u : hw, 16u));
  }
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace ordrisk::internal
