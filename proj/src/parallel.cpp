#include "sparsebound/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sparsebound {

std::int64_t chunk_count(std::int64_t count, const ParallelOptions& options) {
  const std::int64_t chunk = std::max<std::int64_t>(1, options.chunk_size);
  return count <= 0 ? 0 : (count + chunk - 1) / chunk;
}

void parallel_chunks(std::int64_t count, const ParallelOptions& options,
                     const std::function<void(std::int64_t, std::int64_t,
                                              std::int64_t)>& work) {
  const std::int64_t chunk = std::max<std::int64_t>(1, options.chunk_size);
  const std::int64_t chunks = chunk_count(count, options);
  unsigned threads = options.threads != 0 ? options.threads
                                          : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, std::max<std::int64_t>(1, chunks)));

  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        work(c, c * chunk, std::min(count, (c + 1) * chunk));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace sparsebound
