#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace balext::detail {

/// Splits [0, total) into `threads` contiguous ranges and calls
/// fn(worker, begin, end) for each, concurrently. Range boundaries depend
/// only on (threads, total).
template <class Fn>
inline void run_parallel(unsigned threads, std::uint64_t total, Fn&& fn) {
  threads = std::max(1U, static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(total, 1))));
  if (threads == 1) {
    fn(0, 0, total);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    const std::uint64_t begin = total * t / threads;
    const std::uint64_t end = total * (t + 1) / threads;
    pool.emplace_back([&fn, t, begin, end] { fn(t, begin, end); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace balext::detail
