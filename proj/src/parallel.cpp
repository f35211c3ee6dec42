#include "polyrom/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace polyrom {

namespace {
std::atomic<int> g_threads{0};
}

void set_thread_count(int n) { g_threads.store(n < 0 ? 0 : n); }

int thread_count() {
  int n = g_threads.load();
  if (n == 0) {
    unsigned hw = std::thread::hardware_concurrency();
    n = hw == 0 ? 1 : static_cast<int>(hw);
  }
  return n;
}

std::vector<std::pair<std::size_t, std::size_t>> chunk_ranges(
    std::size_t begin, std::size_t end) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t count = end > begin ? end - begin : 0;
  if (count == 0) return out;
  const std::size_t nw =
      std::min<std::size_t>(std::max(thread_count(), 1), count);
  const std::size_t chunk = (count + nw - 1) / nw;
  for (std::size_t w = 0; w < nw; ++w) {
    const std::size_t lo = begin + w * chunk;
    const std::size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    out.emplace_back(lo, hi);
  }
  return out;
}

void parallel_chunks(
    std::size_t begin, std::size_t end,
    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  const auto ranges = chunk_ranges(begin, end);
  if (ranges.empty()) return;
  if (ranges.size() == 1) {
    fn(0, ranges[0].first, ranges[0].second);
    return;
  }
  std::vector<std::exception_ptr> errs(ranges.size());
  std::vector<std::thread> pool;
  pool.reserve(ranges.size());
  for (std::size_t w = 0; w < ranges.size(); ++w) {
    pool.emplace_back([w, &ranges, &fn, &errs] {
      try {
        fn(w, ranges[w].first, ranges[w].second);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn) {
  parallel_chunks(begin, end,
                  [&fn](std::size_t, std::size_t lo, std::size_t hi) {
                    for (std::size_t i = lo; i < hi; ++i) fn(i);
                  });
}

}  // namespace polyrom
