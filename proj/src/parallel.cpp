#include "splab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace splab {

namespace {
std::atomic<unsigned> g_threads{0};

template <typename Fn>
void run_workers(unsigned workers, Fn&& fn) {
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        fn(w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}
}  // namespace

void set_num_threads(unsigned n) { g_threads = n; }

unsigned num_threads() {
  const unsigned n = g_threads.load();
  if (n > 0) return n;
  return std::max(1U, std::thread::hardware_concurrency());
}

void parallel_blocks(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                     std::size_t min_block) {
  const unsigned threads = num_threads();
  const std::size_t blocks = std::min<std::size_t>(threads, (count + min_block - 1) / std::max<std::size_t>(min_block, 1));
  if (blocks <= 1) {
    if (count > 0) body(0, count);
    return;
  }
  const std::size_t step = (count + blocks - 1) / blocks;
  run_workers(static_cast<unsigned>(blocks), [&](unsigned w) {
    const std::size_t b = w * step;
    const std::size_t e = std::min(count, b + step);
    if (b < e) body(b, e);
  });
}

void parallel_jobs(std::size_t count, const std::function<void(std::size_t)>& job) {
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(num_threads(), count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  run_workers(threads, [&](unsigned) {
    for (std::size_t i = next++; i < count; i = next++) job(i);
  });
}

}  // namespace splab
