#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace clockwork {

/// SplitMix64 output function. Used only to expand seeds; never as a sampler.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic seed for substream `stream` of replication `replication`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication,
                          std::uint64_t stream);

/// Single-owner uniform/normal source over mt19937_64.
///
/// All conversions from raw 64-bit words are done here (not through
/// <random> distributions) so the value sequence for a given seed is fixed
/// by this file alone.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);
  RandomStream(std::uint64_t master, std::uint64_t replication,
               std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform();

  double standard_normal();

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace clockwork
