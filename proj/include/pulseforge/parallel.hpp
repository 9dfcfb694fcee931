#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace pulseforge {

// Runs fn(i) for i in [0, count) across at most num_threads workers.
// Indices are split into contiguous blocks so each worker touches a
// contiguous slice of any per-index output buffer. With num_threads <= 1
// the loop runs inline. fn must not throw across threads; callers that
// need error reporting should capture failures into per-index slots.
inline void parallel_for(int count, int num_threads,
                         const std::function<void(int)>& fn) {
  if (count <= 0) return;
  int workers = std::max(1, std::min(num_threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  int base = count / workers;
  int extra = count % workers;
  int start = 0;
  for (int w = 0; w < workers; ++w) {
    int len = base + (w < extra ? 1 : 0);
    int lo = start;
    int hi = start + len;
    start = hi;
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace pulseforge
