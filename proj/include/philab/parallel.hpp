#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace philab {

/// Parallelism cap for the property suites; PHILAB_THREADS overrides.
inline int suite_threads() {
  if (const char* env = std::getenv("PHILAB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs body(chunk_index, begin, end) over [0,n) split into fixed-size chunks.
/// Chunk boundaries do not depend on the thread count, and callers reduce the
/// per-chunk partials in chunk order, so results are identical for any
/// PHILAB_THREADS setting.
template <class Body>
void parallel_chunks(long n, long chunk_size, const Body& body) {
  if (n <= 0) return;
  const long nchunks = (n + chunk_size - 1) / chunk_size;
  const int nthreads = std::min<long>(suite_threads(), nchunks);
  if (nthreads <= 1) {
    for (long c = 0; c < nchunks; ++c)
      body(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (long c = next.fetch_add(1); c < nchunks; c = next.fetch_add(1))
        body(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace philab
