#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ringwalk {

/// Run body(0..count-1) on a pool of worker threads. Work items are claimed
/// through a shared atomic counter, so any schedule is possible; callers get
/// deterministic results by writing each item into its own preallocated slot.
/// workers <= 0 selects the hardware concurrency. The first exception thrown
/// by any item is rethrown on the calling thread after all workers join.
inline void parallel_for(std::size_t count, int workers,
                         const std::function<void(std::size_t)>& body) {
  if (workers <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    workers = hw > 0 ? static_cast<int>(hw) : 1;
  }
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto run = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  const int live = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(workers), count));
  pool.reserve(live);
  for (int w = 0; w < live; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

} // namespace ringwalk
