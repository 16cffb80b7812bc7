#include "plmod/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace plmod {

namespace {
std::atomic<int> g_workers{0};  // 0 = auto
}

void set_workers(int n) { g_workers.store(n < 0 ? 0 : n); }

int workers() {
  int w = g_workers.load();
  if (w > 0) return w;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const int w = std::min<std::size_t>(workers(), n == 0 ? 1 : n);
  if (w <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  const std::size_t chunk = std::max<std::size_t>(1, n / (4 * w));
  auto run = [&]() {
    for (;;) {
      std::size_t begin = next.fetch_add(chunk);
      if (begin >= n) return;
      std::size_t end = std::min(n, begin + chunk);
      for (std::size_t i = begin; i < end; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(w - 1);
  for (int t = 0; t < w - 1; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
}

}  // namespace plmod
