#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace clustertail {

inline constexpr std::uint64_t kChunkSize = 4096;

inline int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Map-reduce over the index range [0, count). The range is cut into fixed
// chunks independent of `threads`; each chunk is folded into a fresh copy of
// `init` by body(begin, end, acc), and the chunk results are merged in chunk
// order with merge(into, from). Results are therefore identical for any
// thread count as long as body is a pure function of its indices.
template <class Acc, class Body, class Merge>
Acc parallel_reduce(std::uint64_t count, int threads, const Acc& init, Body&& body, Merge&& merge,
                    std::uint64_t chunk = kChunkSize) {
  const std::uint64_t chunks = (count + chunk - 1) / chunk;
  std::vector<Acc> partial(chunks, init);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        body(c * chunk, std::min(count, (c + 1) * chunk), partial[c]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(std::min<std::uint64_t>(chunks, 1024))));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  Acc out = init;
  for (auto& p : partial) merge(out, p);
  return out;
}

}  // namespace clustertail
