#pragma once

#include <cstdint>
#include <random>

namespace symchi {

/// SplitMix64 step; used to expand seeds and derive substream keys.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Mixes (seed, stream) into a single well-scrambled 64-bit key, so each
/// (seed, stream) pair indexes a statistically independent substream.
std::uint64_t substream_key(std::uint64_t seed, std::uint64_t stream);

/// Seedable generator with explicit substreams.  All sampling goes through
/// inverse transforms or rejection on 53-bit uniforms, so a (seed, stream)
/// pair reproduces the same draws on every run of the same binary.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01();

  /// Uniform on the open interval (0, 1); safe to feed inverse CDFs.
  double uniform_open();

  /// Standard normal via the inverse CDF.
  double normal();

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace symchi
