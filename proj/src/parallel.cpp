#include "facetflow/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace facetflow {

int max_threads() {
  static const int cached = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("FACETFLOW_THREADS")) {
      int cap = std::atoi(env);
      if (cap >= 1) hw = std::min(hw, cap);
    }
    return hw;
  }();
  return cached;
}

int default_chunks(std::ptrdiff_t n) {
  if (n < 256) return 1;
  return static_cast<int>(std::min<std::ptrdiff_t>(64, n));
}

void parallel_chunks(std::ptrdiff_t n, int n_chunks,
                     const std::function<void(int, std::ptrdiff_t, std::ptrdiff_t)>& fn) {
  if (n <= 0) return;
  n_chunks = std::max(1, std::min<int>(n_chunks, static_cast<int>(n)));
  auto bounds = [&](int c) {
    std::ptrdiff_t lo = n * c / n_chunks;
    std::ptrdiff_t hi = n * (c + 1) / n_chunks;
    return std::pair<std::ptrdiff_t, std::ptrdiff_t>(lo, hi);
  };
  int workers = std::min(max_threads(), n_chunks);
  if (workers <= 1) {
    for (int c = 0; c < n_chunks; ++c) {
      auto [lo, hi] = bounds(c);
      fn(c, lo, hi);
    }
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int c = next.fetch_add(1);
        if (c >= n_chunks) return;
        auto [lo, hi] = bounds(c);
        fn(c, lo, hi);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace facetflow
