#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace isinglab {

inline int resolve_threads(int threads) {
  if (threads > 0) return threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// In-place pairwise tree combine; v[0] holds the result.  The combine order
// depends only on v.size(), never on thread scheduling.
template <class T>
T tree_combine(std::vector<T>& v) {
  if (v.empty()) return T{};
  std::size_t n = v.size();
  while (n > 1) {
    std::size_t h = (n + 1) / 2;
    for (std::size_t i = 0; i + h < n; ++i) v[i] += v[i + h];
    n = h;
  }
  return v[0];
}

// Runs fn(i) for i in [0, count) across worker threads.  fn must write only
// to slot i of caller-owned storage; scheduling then cannot affect results.
template <class Fn>
void parallel_index(std::size_t count, int threads, Fn&& fn) {
  int nt = resolve_threads(threads);
  if (nt <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

// Deterministic parallel reduction: [0, count) is cut into fixed-size tiles
// (tile size never depends on the thread count), each tile reduces
// sequentially via fn(begin, end), and the per-tile partials are combined by
// a pairwise tree in tile order.  Output bits are identical for any number
// of worker threads.
template <class T, class TileFn>
T reduce_tiles(std::size_t count, std::size_t tile, int threads, TileFn&& fn) {
  if (count == 0) return T{};
  if (tile == 0) tile = 1;
  std::size_t n_tiles = (count + tile - 1) / tile;
  std::vector<T> partials(n_tiles);
  parallel_index(n_tiles, threads, [&](std::size_t t) {
    std::size_t b = t * tile;
    std::size_t e = b + tile < count ? b + tile : count;
    partials[t] = fn(b, e);
  });
  return tree_combine(partials);
}

} // namespace isinglab
