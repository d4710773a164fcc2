#pragma once

#include <cstdint>

namespace kglr {

// SplitMix64 (Steele/Lea/Flood). Tiny, seedable, and bit-identical on every
// platform, which is what the reproducibility contract of the benchmark
// outputs needs. Substreams are derived by seeding fresh generators from
// successive outputs of a master instance.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [-1, 1), 53 random bits.
  double next_symmetric() { return 2.0 * double(next() >> 11) * 0x1.0p-53 - 1.0; }

 private:
  std::uint64_t state_;
};

}  // namespace kglr
