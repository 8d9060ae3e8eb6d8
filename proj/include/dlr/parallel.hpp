#pragma once

#include <future>
#include <vector>

namespace dlr {

// Deterministic chunked parallel map: items are split into fixed contiguous
// chunks, each chunk produces a result vector, and the results are merged in
// chunk order, so the output is identical for every thread count.
template <class R, class F>
std::vector<R> parallel_map(uint64_t count, int threads, F&& fn) {
  if (threads < 2 || count < 16) {
    std::vector<R> out;
    out.reserve(count);
    for (uint64_t i = 0; i < count; ++i) out.push_back(fn(i));
    return out;
  }
  uint64_t chunks = std::min<uint64_t>(count, (uint64_t)threads * 4);
  std::vector<std::future<std::vector<R>>> futs;
  for (uint64_t c = 0; c < chunks; ++c) {
    uint64_t lo = count * c / chunks, hi = count * (c + 1) / chunks;
    futs.push_back(std::async(std::launch::async, [lo, hi, &fn]() {
      std::vector<R> part;
      part.reserve(hi - lo);
      for (uint64_t i = lo; i < hi; ++i) part.push_back(fn(i));
      return part;
    }));
  }
  std::vector<R> out;
  out.reserve(count);
  for (auto& f : futs)
    for (auto& r : f.get()) out.push_back(std::move(r));
  return out;
}

}  // namespace dlr
