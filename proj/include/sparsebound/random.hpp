#pragma once

#include <cstdint>
#include <random>

namespace sparsebound {

/// SplitMix64 finalizer. Used to turn (master seed, stream index) pairs
/// into well separated engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// A seeded stream of random variates.
///
/// Streams are cheap to construct. Parallel code never shares a stream:
/// each unit of work (trial, chunk) calls `derive(master, index)` so the
/// variates it sees depend only on the master seed and its own index.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static RandomStream derive(std::uint64_t master, std::uint64_t index) {
    return RandomStream(splitmix64(master) ^ splitmix64(~index));
  }

  double normal() { return normal_(engine_); }
  double normal(double stddev) { return stddev * normal_(engine_); }

  /// Uniform on [0, 1).
  double uniform() { return std::generate_canonical<double, 53>(engine_); }

  /// Uniform integer on [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

  bool coin() { return (engine_() >> 63) != 0; }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace sparsebound
