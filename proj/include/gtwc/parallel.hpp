// Minimal fork-join helper. GTWC_THREADS caps worker parallelism; results
// must not depend on the thread count, so callers write into preallocated
// per-index slots.

#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace gtwc {

inline unsigned worker_count(std::size_t jobs) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("GTWC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && static_cast<unsigned long>(v) < hw) hw = static_cast<unsigned>(v);
  }
  if (jobs < hw) hw = static_cast<unsigned>(jobs);
  return hw == 0 ? 1 : hw;
}

template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  if (count == 0) return;
  const unsigned workers = worker_count(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace gtwc
