#pragma once

#include <cstdint>
#include <functional>

namespace sparsebound {

struct ParallelOptions {
  /// Worker threads; 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
  /// Work items per chunk. Chunk boundaries fix the reduction order, so this
  /// is part of what makes a result reproducible.
  std::int64_t chunk_size = 4096;
};

/// Runs `work(chunk_index, begin, end)` for every chunk of [0, count).
/// Chunks are claimed dynamically by the workers; callers store per-chunk
/// partial results and reduce them in chunk order afterwards.
void parallel_chunks(std::int64_t count, const ParallelOptions& options,
                     const std::function<void(std::int64_t chunk, std::int64_t begin,
                                              std::int64_t end)>& work);

/// Number of chunks `parallel_chunks` will produce for `count` items.
std::int64_t chunk_count(std::int64_t count, const ParallelOptions& options);

}  // namespace sparsebound
